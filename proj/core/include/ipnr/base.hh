/*
 *  ipnr -- a miniature island-style FPGA place-and-route flow
 *
 *  Permission to use, copy, modify, and/or distribute this software for any
 *  purpose with or without fee is hereby granted, provided that the above
 *  copyright notice and this permission notice appear in all copies.
 *
 *  THE SOFTWARE IS PROVIDED "AS IS" AND THE AUTHOR DISCLAIMS ALL WARRANTIES
 *  WITH REGARD TO THIS SOFTWARE.
 */

#ifndef IPNR_BASE_HH
#define IPNR_BASE_HH

#include <compare>
#include <cstdint>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace ipnr {

struct Error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// Canonical ordering for all fabric identifiers is (y, x, index); iteration
// in this order is what makes every stage deterministic.
template <typename Tag> struct Id
{
    int16_t x = -1, y = -1;
    int32_t index = -1;

    bool valid() const { return index >= 0; }

    friend bool operator==(const Id &, const Id &) = default;
    friend auto operator<=>(const Id &a, const Id &b)
    {
        return std::tie(a.y, a.x, a.index) <=> std::tie(b.y, b.x, b.index);
    }
};

struct WireTag;
struct PipTag;
struct BelTag;
using WireId = Id<WireTag>;
using PipId = Id<PipTag>;
using BelId = Id<BelTag>;

// The dedicated clock network lives outside the general routing graph.
inline constexpr WireId GLOBAL_CLOCK_WIRE{-2, -2, 0};

template <typename Tag> struct IdHash
{
    size_t operator()(const Id<Tag> &id) const
    {
        uint64_t v = (uint64_t(uint16_t(id.y)) << 48) | (uint64_t(uint16_t(id.x)) << 32) | uint32_t(id.index);
        v *= 0x9E3779B97F4A7C15ull;
        return size_t(v ^ (v >> 29));
    }
};

uint32_t crc32(const uint8_t *data, size_t len, uint32_t crc = 0);
uint64_t fnv1a64(const uint8_t *data, size_t len);

std::string str_format(const char *fmt, ...);

} // namespace ipnr

#endif
