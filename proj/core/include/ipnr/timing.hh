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

#ifndef IPNR_TIMING_HH
#define IPNR_TIMING_HH

#include <optional>

#include "ipnr/design.hh"
#include "ipnr/pack.hh"

namespace ipnr {

// All interconnect and cell delays, in picoseconds. The defaults match the
// delays baked into generated devices, so routed-path sums agree with the
// router's cost bookkeeping.
struct DelayModel
{
    int32_t inter_tile_ps = 100;
    int32_t switchbox_ps = 50;
    int32_t connection_ps = 120;
    int32_t lut_comb_ps = 200; // LUT input to output
    int32_t ff_clk_q_ps = 150;
    int32_t ff_setup_ps = 100;

    int32_t pip_delay(PipClass cls) const
    {
        switch (cls) {
        case PipClass::INTER_TILE:
            return inter_tile_ps;
        case PipClass::SWITCHBOX:
            return switchbox_ps;
        default:
            return connection_ps;
        }
    }
};

// Sink pin key: (cell name, port name); top ports use ("", port name).
using PinKey = std::pair<std::string, std::string>;

struct Endpoint
{
    std::string name;
    int64_t arrival_ps = 0;
    int64_t slack_ps = 0;
};

struct TimingReport
{
    double fmax_mhz = 0.0;                  // 1e6 / worst reg-to-reg ps; 0 if none
    int64_t worst_path_ps = 0;              // worst path of any kind
    std::vector<std::string> critical_path; // ordered element descriptions
    std::vector<Endpoint> endpoints;
    std::map<PinKey, double> criticality; // per sink pin, in [0,1]

    nlohmann::json to_json() const;
};

// Lower-bound point-to-point delay: Manhattan tile distance times the
// minimum inter-tile delay, plus one connection hop per endpoint that is a
// bel input/output wire. Admissible for the router's A* heuristic.
int64_t estimate_delay(const DeviceDB &db, WireId from, WireId to, const DelayModel &model);

// Static timing analysis of a packed netlist. Routed nets use the bound
// pip walks in `routing`; unrouted nets fall back to estimate_delay between
// the bound bel pins (or 0 when either end is an unplaced top port).
// `period_ps` sets the required time at register/output endpoints; by
// default the worst path is its own requirement (zero worst slack).
TimingReport sta(const DeviceDB &db, const Netlist &n, const Placement &placement, const Routing *routing,
                 const DelayModel &model, std::optional<int64_t> period_ps = std::nullopt);

// Routed delay of one sink of a route tree: sum of its pip walk delays.
int64_t route_sink_delay(const DeviceDB &db, const RouteTree &tree, WireId sink, const DelayModel &model);

} // namespace ipnr

#endif
