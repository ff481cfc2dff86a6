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

#ifndef IPNR_ROUTE_HH
#define IPNR_ROUTE_HH

#include <optional>
#include <set>

#include "ipnr/design.hh"
#include "ipnr/timing.hh"

namespace ipnr {

struct Unroutable : Error
{
    using Error::Error;
};

struct RoutingFailed : Error
{
    RoutingFailed(const std::string &msg, int32_t iterations_, int64_t overused_wires_)
        : Error(msg), iterations(iterations_), overused_wires(overused_wires_)
    {
    }
    int32_t iterations;
    int64_t overused_wires;
};

// Per-wire congestion bookkeeping across rip-up iterations. Wires are
// addressed by their dense flat index.
struct CongestionState
{
    std::vector<int32_t> present;  // number of distinct nets on the wire
    std::vector<double> history;   // accumulated overuse penalty
    std::vector<uint8_t> blocked;  // administratively unusable wires
    int32_t iteration = 1;
    double present_factor = 0.5;   // penalty per extra occupant, times iteration
    double history_increment = 0.2;

    explicit CongestionState(int64_t wire_count = 0)
        : present(size_t(wire_count), 0), history(size_t(wire_count), 0.0), blocked(size_t(wire_count), 0)
    {
    }
    // Congestion multiplier for entering `flat` while routing one more net.
    double multiplier(int64_t flat) const
    {
        return 1.0 + present_factor * double(iteration) * double(present[size_t(flat)]) +
               history[size_t(flat)];
    }
};

// One A* search from a set of already-reached wires to a sink wire.
// Returns the new pip walk (starting at `entry`, one of the sources), the
// pure path delay of those pips, and the congestion-weighted cost.
struct AstarResult
{
    WireId entry;
    std::vector<PipId> pips;
    int64_t delay_ps = 0;
    double cost = 0.0;
};
std::optional<AstarResult> astar_search(const DeviceDB &db, const std::vector<WireId> &sources, WireId sink,
                                        const CongestionState &congestion, double criticality,
                                        const DelayModel &model = DelayModel{});

// Route one net from the placed driver pin to all placed sink pins, most
// critical sink first. Pure in (db, placement, congestion snapshot).
RouteTree route_net_astar(const DeviceDB &db, const Netlist &n, int32_t net, const Placement &placement,
                          const CongestionState &congestion, const std::map<PinKey, double> &criticality,
                          const DelayModel &model = DelayModel{},
                          std::vector<int64_t> *sink_delays = nullptr);

struct RouteConfig
{
    int32_t max_iterations = 50;
    DelayModel model;
    double present_factor = 0.5;
    double history_increment = 0.2;
    // Cap on the criticality used in the cost blend. At criticality 1.0 the
    // congestion term vanishes and fully critical designs (zero worst slack
    // makes every pin criticality 1.0) could never negotiate; the cap keeps
    // a congestion floor in every net's cost.
    double max_criticality = 0.8;
};

struct RouteResult
{
    Routing routing;
    int32_t iterations = 0;
    // Router-recorded pure delay per (net, sink wire), for cross-checking
    // against the pip walks.
    std::map<std::pair<int32_t, WireId>, int64_t> sink_delay_ps;
};

// Iterative rip-up-and-reroute until no wire is shared between nets.
// Clock nets ride the dedicated global network and are not routed here.
RouteResult route_all(const DeviceDB &db, const Netlist &n, const Placement &placement,
                      const RouteConfig &cfg = RouteConfig{});

// Structural audit: tree shape, sink completeness, exclusive wire use,
// consistent pip walks. Empty result means legal.
std::vector<std::string> audit_routing(const DeviceDB &db, const Netlist &n, const Placement &placement,
                                       const Routing &r);

} // namespace ipnr

#endif
