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

#ifndef IPNR_PACK_HH
#define IPNR_PACK_HH

#include "ipnr/netlist.hh"

namespace ipnr {

struct UnpackableCell : Error
{
    using Error::Error;
};
struct CombinationalLoop : Error
{
    using Error::Error;
};
struct ClockDomainError : Error
{
    using Error::Error;
};

// Merge LUT_K cells with their dedicated fanout flip-flops into LUTFF
// cells; lone flip-flops become FF-only LUTFFs with an identity mask.
// LUTFF and PAD cells pass through unchanged, making packing idempotent.
Netlist pack_netlist(const Netlist &n, int K);

// Drop net ids no longer referenced by any port or connection.
void compact_nets(Netlist &n);

// Cycle-accurate simulation with every FF a posedge register on the single
// global clock. Inputs are top-level input ports and/or input PAD cells,
// addressed by name; clock inputs are implicit and ignored in the stimulus.
// Works on generic ($lut/$dff), mapped (LUT_K/MUX2) and packed (LUTFF)
// netlists alike, so it can act as the equivalence oracle between stages.
using Stimulus = std::map<std::string, std::vector<uint8_t>>;
using Trace = std::vector<std::map<std::string, uint8_t>>;
Trace simulate(const Netlist &n, const Stimulus &stimulus, int cycles);

// Nets that drive only clock pins ($dff.C / LUTFF.CLK); treated as ideal.
std::vector<int32_t> clock_nets(const Netlist &n);

} // namespace ipnr

#endif
