#include <doctest.h>

#include "ipnr/netlist.hh"
#include "netlist_gen.hh"

using namespace ipnr;

namespace {

const char *ONE_LUT_DOC = R"({
  "modules": {
    "top": {
      "ports": {
        "a": {"direction": "input", "bits": [2]},
        "b": {"direction": "input", "bits": [3]},
        "y": {"direction": "output", "bits": [4]}
      },
      "cells": {
        "xor0": {
          "type": "$lut",
          "parameters": {"WIDTH": 2, "LUT": "0110"},
          "connections": {"A0": [2], "A1": [3], "Y": [4]}
        }
      }
    }
  }
})";

} // namespace

TEST_SUITE("netlist")
{
    TEST_CASE("parse a one-LUT document")
    {
        Netlist n = parse_netlist(ONE_LUT_DOC);
        CHECK(n.top == "top");
        CHECK(n.cells.size() == 1);
        CHECK(n.num_nets == 3);
        CHECK(n.ports.size() == 3);
        // Dense ids preserving relative order: 2,3,4 -> 0,1,2.
        CHECK(n.ports.at("a").net == 0);
        CHECK(n.ports.at("y").net == 2);
        CHECK(validate(n).empty());

        auto nets = n.net_table();
        REQUIRE(nets[2].driver.has_value());
        CHECK(nets[2].driver->cell == "xor0");
        CHECK(nets[2].sinks.size() == 1);
    }

    TEST_CASE("parse errors")
    {
        CHECK_THROWS_AS(parse_netlist("{not json"), SyntaxError);
        CHECK_THROWS_AS(parse_netlist(R"({"modules": {}})"), NoTopModule);
        CHECK_THROWS_AS(parse_netlist(R"({"modules": {"a": {}, "b": {}}})"), NoTopModule);

        std::string bad_mask = ONE_LUT_DOC;
        bad_mask.replace(bad_mask.find("\"WIDTH\": 2"), 10, "\"WIDTH\": 3");
        CHECK_THROWS_AS(parse_netlist(bad_mask), BadMaskWidth);

        const char *two_drivers = R"({
          "modules": {"top": {
            "cells": {
              "l0": {"type": "$lut", "parameters": {"WIDTH": 2, "LUT": "0110"},
                     "connections": {"A0": [2], "A1": [3], "Y": [4]}},
              "l1": {"type": "$lut", "parameters": {"WIDTH": 2, "LUT": "0110"},
                     "connections": {"A0": [2], "A1": [3], "Y": [4]}}
            }}}})";
        CHECK_THROWS_AS(parse_netlist(two_drivers), MultipleDrivers);

        const char *inout = R"({
          "modules": {"top": {"ports": {"io": {"direction": "inout", "bits": [2]}}}}})";
        CHECK_THROWS_AS(parse_netlist(inout), SyntaxError);

        const char *dangling = R"({
          "modules": {"top": {
            "netnames": {"n2": {"bits": [2]}},
            "cells": {"l0": {"type": "$lut", "parameters": {"WIDTH": 2, "LUT": "0110"},
                      "connections": {"A0": [2], "A1": [9], "Y": [2]}}}}}})";
        CHECK_THROWS_AS(parse_netlist(dangling), DanglingNet);
    }

    TEST_CASE("write/parse round trip and determinism")
    {
        Netlist n = parse_netlist(ONE_LUT_DOC);
        std::string text = write_netlist(n);
        CHECK(parse_netlist(text) == n);
        CHECK(write_netlist(n) == text);

        // Ports-only netlist.
        Netlist e;
        e.top = "empty";
        int32_t net = e.add_net();
        e.ports.emplace("in", TopPort{PortDir::INPUT, net});
        std::string etext = write_netlist(e);
        CHECK(etext.find("\"cells\": {}") != std::string::npos);
        CHECK(parse_netlist(etext) == e);
    }

    TEST_CASE("round trip on random netlists")
    {
        for (uint64_t seed = 1; seed <= 20; seed++) {
            ipnr_test::RandomNetlistSpec spec;
            spec.num_luts = 12;
            Netlist n = ipnr_test::random_netlist(spec, seed);
            REQUIRE(validate(n).empty());
            Netlist back = parse_netlist(write_netlist(n));
            CHECK(back == n);
            CHECK(write_netlist(back) == write_netlist(n));
        }
    }

    TEST_CASE("validation diagnostics")
    {
        Netlist n = parse_netlist(ONE_LUT_DOC);
        CHECK(validate(n).empty());

        // Two drivers, built programmatically.
        Netlist twod = n;
        Cell dup = twod.cells.at("xor0");
        twod.cells.emplace("xor1", dup);
        auto diags = validate(twod);
        REQUIRE(diags.size() == 1);
        CHECK(diags[0].rule == "MultipleDrivers");
        CHECK(diags[0].str().find("ERROR net 2") == 0);

        // Undriven net feeding a sink.
        Netlist und = n;
        und.cells.erase("xor0");
        und.ports.erase("b"); // net 1 now has no driver
        Cell sink;
        sink.type = "$dff";
        sink.conns["C"] = 0;
        sink.conns["D"] = 1;
        sink.conns["Q"] = 2;
        und.cells.emplace("ff", sink);
        bool no_driver = false;
        for (const auto &d : validate(und))
            if (d.rule == "NoDriver")
                no_driver = true;
        CHECK(no_driver);
    }
}
