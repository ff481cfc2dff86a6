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

#ifndef IPNR_TECHMAP_HH
#define IPNR_TECHMAP_HH

#include <string>
#include <vector>

#include "ipnr/netlist.hh"

namespace ipnr {

struct WidthMismatch : Error
{
    using Error::Error;
};
struct WidthTooSmall : Error
{
    using Error::Error;
};

// 2^W-bit truth table; bits[i] is the output when the inputs encode i with
// A[0] least significant.
struct LutMask
{
    int width = 0;
    std::vector<uint8_t> bits; // one entry per input vector, values 0/1

    static LutMask zeros(int w);
    // f(A) = A[k], widened to w inputs.
    static LutMask input_identity(int w, int k);
    // Serialized form: bit 2^W-1 first.
    static LutMask from_string(int w, const std::string &s);
    std::string to_string() const;
    std::string to_hex() const; // e.g. 0xCA, zero-padded to 2^W/4 digits

    friend bool operator==(const LutMask &, const LutMask &) = default;
};

uint8_t eval_lut(const LutMask &mask, const std::vector<uint8_t> &inputs);

// Shannon split on the highest-numbered input: lo is the A[W-1]=0 half,
// hi the A[W-1]=1 half, both of width W-1.
std::pair<LutMask, LutMask> split_lut_mask(const LutMask &mask);

// Widen by mask replication; the added high inputs are don't-care.
LutMask replicate_mask(const LutMask &mask, int target_width);

// Truth table of Y = S ? I1 : I0 with (I0, I1, S) = (A[0], A[1], A[2]).
LutMask mux_lut3_mask();

struct DecompStats
{
    int leaf_luts = 0;
    int muxes = 0; // MUX2 cells, or LUT3-lowered muxes when hard muxes are off
};

// Emit the decomposition of one mask into `out` as LUT_K (and MUX2) cells.
// Fresh cells and nets are namespaced under `cell_name`; padding inputs of
// under-width LUTs connect to `gnd_net`.
DecompStats decompose_lut(Netlist &out, const std::string &cell_name, const LutMask &mask,
                          const std::vector<int32_t> &input_nets, int32_t out_net, int K, bool allow_hard_mux,
                          int32_t gnd_net);

Netlist techmap_netlist(const Netlist &n, int K, bool allow_hard_mux);

} // namespace ipnr

#endif
