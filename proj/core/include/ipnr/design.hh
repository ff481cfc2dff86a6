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

#ifndef IPNR_DESIGN_HH
#define IPNR_DESIGN_HH

#include <set>

#include "ipnr/archdb.hh"
#include "ipnr/netlist.hh"

namespace ipnr {

struct UnplacedPin : Error
{
    using Error::Error;
};

// A complete cell -> bel binding with its provenance.
struct Placement
{
    std::map<std::string, BelId> cells;
    std::set<std::string> fixed; // cells pinned by constraints
    uint64_t seed = 0;
    double hpwl_cost = 0.0;
    double timing_cost = 0.0;

    BelId bel_of(const std::string &cell) const
    {
        auto it = cells.find(cell);
        if (it == cells.end())
            throw UnplacedPin("cell '" + cell + "' is not placed");
        return it->second;
    }
    friend bool operator==(const Placement &a, const Placement &b)
    {
        return a.cells == b.cells && a.fixed == b.fixed;
    }
};

// Per-net routing: a tree rooted at the source wire. Each sink stores the
// full ordered pip walk from the source; shared prefixes repeat in the
// per-sink lists but each wire/pip is bound once.
struct RouteTree
{
    int32_t net = -1;
    WireId source;
    std::vector<std::pair<WireId, std::vector<PipId>>> sinks; // in route order
    friend bool operator==(const RouteTree &, const RouteTree &) = default;
};

struct Routing
{
    std::map<int32_t, RouteTree> nets;
    friend bool operator==(const Routing &, const Routing &) = default;
};

// Store the placement on the netlist (cell attribute "IPNR_BEL") and read
// it back; used by the flow to persist intermediate designs as JSON.
void attach_placement(Netlist &n, const DeviceDB &db, const Placement &p);
Placement extract_placement(const Netlist &n, const DeviceDB &db);

// Routing persists under the top-level attribute "IPNR_ROUTING" as per-net
// ordered pip name lists.
void attach_routing(Netlist &n, const DeviceDB &db, const Routing &r);
Routing extract_routing(const Netlist &n, const DeviceDB &db);

// Rebuild the wire/pip/bel binding maps implied by a placed+routed design.
BindingState design_bindings(const DeviceDB &db, const Netlist &n, const Placement &p, const Routing &r);

// Wire carrying a cell pin, given the cell's bel. Top ports have no wire.
WireId cell_pin_wire(const DeviceDB &db, const Placement &p, const std::string &cell, const std::string &port);

} // namespace ipnr

#endif
