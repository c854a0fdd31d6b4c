// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace mfso {

using Rng = std::mt19937_64;

// Independent generator for block `block` of the run seeded by `seed`.
// The (seed, block) pair is the whole state, so any block can be replayed on its own.
inline Rng make_substream(std::uint64_t seed, std::uint64_t block)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), 0x6d66736fu};
    return Rng(seq);
}

} // namespace mfso
