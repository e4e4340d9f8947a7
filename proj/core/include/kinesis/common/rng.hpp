// Copyright (c) 2026 The Kinesis Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace kinesis {

using Rng = std::mt19937_64;

/// Mixes a base seed with a stream index (splitmix64 finalizer). Used to give
/// every generated item its own independent seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// 64-bit FNV-1a; stable across platforms, used to seed per-label generators.
std::uint64_t fnv1a(std::string_view text);

}  // namespace kinesis
