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

#include "ipnr/archdb.hh"

#include <algorithm>
#include <cstring>
#include <fstream>

namespace ipnr {

namespace {

constexpr int32_t DELAY_INTER_TILE = 100;
constexpr int32_t DELAY_SWITCHBOX = 50;
constexpr int32_t DELAY_CONNECTION = 120;

const char MAGIC[8] = {'I', 'P', 'N', 'R', 'D', 'B', '0', '1'};

struct ByteWriter
{
    std::vector<uint8_t> buf;

    void u8(uint8_t v) { buf.push_back(v); }
    void i8(int8_t v) { buf.push_back(uint8_t(v)); }
    void u32(uint32_t v)
    {
        for (int i = 0; i < 4; i++)
            buf.push_back(uint8_t(v >> (8 * i)));
    }
    void i32(int32_t v) { u32(uint32_t(v)); }
    void u64(uint64_t v)
    {
        u32(uint32_t(v));
        u32(uint32_t(v >> 32));
    }
    void str(const std::string &s)
    {
        if (s.size() > 0xFFFF)
            throw Error("string too long for serialization");
        u8(uint8_t(s.size() & 0xFF));
        u8(uint8_t(s.size() >> 8));
        buf.insert(buf.end(), s.begin(), s.end());
    }
};

struct ByteReader
{
    const std::vector<uint8_t> &buf;
    size_t pos = 0;

    void need(size_t n) const
    {
        if (pos + n > buf.size())
            throw CorruptDatabase("unexpected end of database file");
    }
    uint8_t u8()
    {
        need(1);
        return buf[pos++];
    }
    int8_t i8() { return int8_t(u8()); }
    uint32_t u32()
    {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; i++)
            v |= uint32_t(buf[pos++]) << (8 * i);
        return v;
    }
    int32_t i32() { return int32_t(u32()); }
    uint64_t u64()
    {
        uint64_t lo = u32();
        return lo | (uint64_t(u32()) << 32);
    }
    std::string str()
    {
        size_t n = u8();
        n |= size_t(u8()) << 8;
        need(n);
        std::string s(reinterpret_cast<const char *>(buf.data() + pos), n);
        pos += n;
        return s;
    }
};

void write_tile_type(ByteWriter &w, const TileType &t)
{
    w.u8(uint8_t(t.kind));
    w.u32(uint32_t(t.wires.size()));
    for (const auto &wire : t.wires) {
        w.str(wire.name);
        w.u8(uint8_t(wire.cls));
        w.i32(wire.delay_ps);
    }
    w.u32(uint32_t(t.pips.size()));
    for (const auto &pip : t.pips) {
        w.i8(pip.src.dx);
        w.i8(pip.src.dy);
        w.i32(pip.src.index);
        w.i8(pip.dst.dx);
        w.i8(pip.dst.dy);
        w.i32(pip.dst.index);
        w.u8(uint8_t(pip.cls));
        w.i32(pip.delay_ps);
    }
    w.u32(uint32_t(t.bels.size()));
    for (const auto &bel : t.bels) {
        w.str(bel.name);
        w.u8(uint8_t(bel.kind));
        w.u32(uint32_t(bel.pins.size()));
        for (const auto &pin : bel.pins) {
            w.str(pin.name);
            w.i32(pin.wire);
        }
    }
}

TileType read_tile_type(ByteReader &r)
{
    TileType t;
    uint8_t kind = r.u8();
    if (kind > uint8_t(TileKind::LOGIC))
        throw CorruptDatabase("bad tile kind");
    t.kind = TileKind(kind);
    uint32_t n_wires = r.u32();
    for (uint32_t i = 0; i < n_wires; i++) {
        LocalWire w;
        w.name = r.str();
        w.cls = WireClass(r.u8());
        w.delay_ps = r.i32();
        t.wires.push_back(std::move(w));
    }
    uint32_t n_pips = r.u32();
    for (uint32_t i = 0; i < n_pips; i++) {
        LocalPip p;
        p.src.dx = r.i8();
        p.src.dy = r.i8();
        p.src.index = r.i32();
        p.dst.dx = r.i8();
        p.dst.dy = r.i8();
        p.dst.index = r.i32();
        p.cls = PipClass(r.u8());
        p.delay_ps = r.i32();
        t.pips.push_back(p);
    }
    uint32_t n_bels = r.u32();
    for (uint32_t i = 0; i < n_bels; i++) {
        LocalBel b;
        b.name = r.str();
        b.kind = BelKind(r.u8());
        uint32_t n_pins = r.u32();
        for (uint32_t j = 0; j < n_pins; j++) {
            BelPin pin;
            pin.name = r.str();
            pin.wire = r.i32();
            b.pins.push_back(std::move(pin));
        }
        t.bels.push_back(std::move(b));
    }
    return t;
}

TileKind tile_kind_at(const ArchParams &p, int x, int y)
{
    bool wx = (x == 0), ex = (x == p.width - 1);
    bool sy = (y == 0), ny = (y == p.height - 1);
    if ((wx || ex) && (sy || ny))
        return TileKind::CORNER;
    if (wx)
        return TileKind::IO_W;
    if (ex)
        return TileKind::IO_E;
    if (sy)
        return TileKind::IO_S;
    if (ny)
        return TileKind::IO_N;
    return TileKind::LOGIC;
}

void sort_pips(std::vector<LocalPip> &pips)
{
    std::sort(pips.begin(), pips.end(), [](const LocalPip &a, const LocalPip &b) {
        return std::tie(a.src, a.dst, a.cls, a.delay_ps) < std::tie(b.src, b.dst, b.cls, b.delay_ps);
    });
}

} // namespace

const char *tile_kind_name(TileKind k)
{
    switch (k) {
    case TileKind::CORNER:
        return "CORNER";
    case TileKind::IO_N:
        return "IO_N";
    case TileKind::IO_S:
        return "IO_S";
    case TileKind::IO_E:
        return "IO_E";
    case TileKind::IO_W:
        return "IO_W";
    case TileKind::LOGIC:
        return "LOGIC";
    }
    return "?";
}

void ArchParams::validate() const
{
    if (width < 3 || height < 3)
        throw InvalidParams("device must be at least 3x3 tiles");
    if (channel_width < 1 || bels_per_tile < 1 || pads_per_io < 1)
        throw InvalidParams("channel_width, bels_per_tile and pads_per_io must be positive");
    if (lut_inputs < 2 || lut_inputs > 8)
        throw InvalidParams("lut_inputs must be between 2 and 8");
    if ((width - 2) * (height - 2) < 1)
        throw InvalidParams("no interior logic tile");
}

std::vector<uint8_t> TileType::canonical_bytes() const
{
    ByteWriter w;
    write_tile_type(w, *this);
    return std::move(w.buf);
}

TileType naive_tile_record(const ArchParams &p, int x, int y)
{
    const int C = p.channel_width, K = p.lut_inputs, N = p.bels_per_tile, P = p.pads_per_io;
    TileType t;
    t.kind = tile_kind_at(p, x, y);

    auto chan_h = [&](int c) { return c; };
    auto chan_v = [&](int c) { return C + c; };

    if (t.kind == TileKind::LOGIC) {
        for (int c = 0; c < C; c++)
            t.wires.push_back({"H" + std::to_string(c), WireClass::CHAN_H, 0});
        for (int c = 0; c < C; c++)
            t.wires.push_back({"V" + std::to_string(c), WireClass::CHAN_V, 0});
        for (int n = 0; n < N; n++)
            for (int k = 0; k < K; k++)
                t.wires.push_back({"I" + std::to_string(n) + "_" + std::to_string(k), WireClass::BEL_IN, 0});
        for (int n = 0; n < N; n++)
            t.wires.push_back({"O" + std::to_string(n), WireClass::BEL_OUT, 0});

        auto bel_in = [&](int n, int k) { return 2 * C + n * K + k; };
        auto bel_out = [&](int n) { return 2 * C + N * K + n; };

        // Inter-tile segments, one pip per direction.
        for (int c = 0; c < C; c++) {
            t.pips.push_back({{0, 0, chan_h(c)}, {+1, 0, chan_h(c)}, PipClass::INTER_TILE, DELAY_INTER_TILE});
            t.pips.push_back({{0, 0, chan_h(c)}, {-1, 0, chan_h(c)}, PipClass::INTER_TILE, DELAY_INTER_TILE});
            t.pips.push_back({{0, 0, chan_v(c)}, {0, +1, chan_v(c)}, PipClass::INTER_TILE, DELAY_INTER_TILE});
            t.pips.push_back({{0, 0, chan_v(c)}, {0, -1, chan_v(c)}, PipClass::INTER_TILE, DELAY_INTER_TILE});
        }
        // Disjoint switchbox.
        for (int c = 0; c < C; c++) {
            t.pips.push_back({{0, 0, chan_h(c)}, {0, 0, chan_v(c)}, PipClass::SWITCHBOX, DELAY_SWITCHBOX});
            t.pips.push_back({{0, 0, chan_v(c)}, {0, 0, chan_h(c)}, PipClass::SWITCHBOX, DELAY_SWITCHBOX});
        }
        // Connection box, alternating parity.
        for (int n = 0; n < N; n++)
            for (int k = 0; k < K; k++)
                for (int c = 0; c < C; c++) {
                    if ((c + k) % 2 == 0)
                        t.pips.push_back({{0, 0, chan_h(c)}, {0, 0, bel_in(n, k)}, PipClass::CONNECTION, DELAY_CONNECTION});
                    else
                        t.pips.push_back({{0, 0, chan_v(c)}, {0, 0, bel_in(n, k)}, PipClass::CONNECTION, DELAY_CONNECTION});
                }
        for (int n = 0; n < N; n++) {
            t.pips.push_back({{0, 0, bel_out(n)}, {0, 0, chan_h(n % C)}, PipClass::CONNECTION, DELAY_CONNECTION});
            t.pips.push_back({{0, 0, bel_out(n)}, {0, 0, chan_v((n + 1) % C)}, PipClass::CONNECTION, DELAY_CONNECTION});
        }

        for (int n = 0; n < N; n++) {
            LocalBel b;
            b.name = "bel" + std::to_string(n);
            b.kind = BelKind::LUTFF;
            for (int k = 0; k < K; k++)
                b.pins.push_back({"I" + std::to_string(k), bel_in(n, k)});
            b.pins.push_back({"CLK", -1});
            b.pins.push_back({"Q", bel_out(n)});
            t.bels.push_back(std::move(b));
        }
    } else if (t.kind != TileKind::CORNER) {
        // IO tile: pads connect to the interior-facing channel of the
        // neighbouring tile (vertical wires for N/S, horizontal for E/W).
        int8_t dx = 0, dy = 0;
        bool vertical = false;
        switch (t.kind) {
        case TileKind::IO_S:
            dy = +1;
            vertical = true;
            break;
        case TileKind::IO_N:
            dy = -1;
            vertical = true;
            break;
        case TileKind::IO_W:
            dx = +1;
            break;
        case TileKind::IO_E:
            dx = -1;
            break;
        default:
            break;
        }
        for (int q = 0; q < P; q++) {
            t.wires.push_back({"PADIN_" + std::to_string(q), WireClass::PAD_IN, 0});
            t.wires.push_back({"PADOUT_" + std::to_string(q), WireClass::PAD_OUT, 0});
        }
        for (int q = 0; q < P; q++) {
            int32_t padin = 2 * q, padout = 2 * q + 1;
            for (int c = 0; c < C; c++) {
                int32_t chan = vertical ? chan_v(c) : chan_h(c);
                t.pips.push_back({{0, 0, padout}, {dx, dy, chan}, PipClass::CONNECTION, DELAY_CONNECTION});
                t.pips.push_back({{dx, dy, chan}, {0, 0, padin}, PipClass::CONNECTION, DELAY_CONNECTION});
            }
        }
        for (int q = 0; q < P; q++) {
            LocalBel b;
            b.name = "pad" + std::to_string(q);
            b.kind = BelKind::PAD;
            b.pins.push_back({"PADIN", 2 * q});
            b.pins.push_back({"PADOUT", 2 * q + 1});
            t.bels.push_back(std::move(b));
        }
    }

    sort_pips(t.pips);
    return t;
}

void deduplicate(const std::vector<TileType> &naive_tiles, int width, int height,
                 std::vector<TileType> &tile_types_out, std::vector<int32_t> &grid_out)
{
    tile_types_out.clear();
    grid_out.assign(size_t(width) * size_t(height), -1);
    std::map<std::vector<uint8_t>, int32_t> seen;
    for (int y = 0; y < height; y++)
        for (int x = 0; x < width; x++) {
            const TileType &t = naive_tiles[size_t(y) * size_t(width) + size_t(x)];
            auto bytes = t.canonical_bytes();
            auto it = seen.find(bytes);
            int32_t idx;
            if (it == seen.end()) {
                idx = int32_t(tile_types_out.size());
                tile_types_out.push_back(t);
                seen.emplace(std::move(bytes), idx);
            } else {
                idx = it->second;
            }
            grid_out[size_t(y) * size_t(width) + size_t(x)] = idx;
        }
}

DeviceDB DeviceDB::generate(const ArchParams &params)
{
    params.validate();
    DeviceDB db;
    db.params = params;
    std::vector<TileType> naive;
    naive.reserve(size_t(params.width) * size_t(params.height));
    for (int y = 0; y < params.height; y++)
        for (int x = 0; x < params.width; x++)
            naive.push_back(naive_tile_record(params, x, y));
    deduplicate(naive, params.width, params.height, db.tile_types, db.grid);
    db.build_index();
    db.check_invariants();
    return db;
}

std::vector<uint8_t> serialize_naive(const ArchParams &params)
{
    params.validate();
    ByteWriter w;
    w.buf.insert(w.buf.end(), MAGIC, MAGIC + 8);
    for (int y = 0; y < params.height; y++)
        for (int x = 0; x < params.width; x++)
            write_tile_type(w, naive_tile_record(params, x, y));
    return std::move(w.buf);
}

std::vector<uint8_t> DeviceDB::save_bytes() const
{
    ByteWriter w;
    w.buf.insert(w.buf.end(), MAGIC, MAGIC + 8);
    w.i32(params.width);
    w.i32(params.height);
    w.i32(params.channel_width);
    w.i32(params.lut_inputs);
    w.i32(params.bels_per_tile);
    w.i32(params.pads_per_io);
    w.u64(params.seed);
    w.u32(uint32_t(tile_types.size()));
    for (const auto &t : tile_types)
        write_tile_type(w, t);
    for (int32_t g : grid)
        w.i32(g);
    w.u32(crc32(w.buf.data(), w.buf.size()));
    return std::move(w.buf);
}

void DeviceDB::save(const std::string &path) const
{
    auto bytes = save_bytes();
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot open " + path + " for writing");
    f.write(reinterpret_cast<const char *>(bytes.data()), std::streamsize(bytes.size()));
    if (!f)
        throw Error("write failed: " + path);
}

DeviceDB DeviceDB::load_bytes(const std::vector<uint8_t> &bytes)
{
    if (bytes.size() < 12 || std::memcmp(bytes.data(), MAGIC, 8) != 0)
        throw CorruptDatabase("bad magic or truncated header");
    uint32_t stored_crc = 0;
    for (int i = 0; i < 4; i++)
        stored_crc |= uint32_t(bytes[bytes.size() - 4 + size_t(i)]) << (8 * i);
    if (crc32(bytes.data(), bytes.size() - 4) != stored_crc)
        throw CorruptDatabase("checksum mismatch");

    ByteReader r{bytes};
    r.pos = 8;
    DeviceDB db;
    db.params.width = r.i32();
    db.params.height = r.i32();
    db.params.channel_width = r.i32();
    db.params.lut_inputs = r.i32();
    db.params.bels_per_tile = r.i32();
    db.params.pads_per_io = r.i32();
    db.params.seed = r.u64();
    uint32_t n_types = r.u32();
    for (uint32_t i = 0; i < n_types; i++)
        db.tile_types.push_back(read_tile_type(r));
    size_t n_grid = size_t(db.params.width) * size_t(db.params.height);
    for (size_t i = 0; i < n_grid; i++)
        db.grid.push_back(r.i32());
    if (r.pos != bytes.size() - 4)
        throw CorruptDatabase("trailing bytes in database file");
    db.build_index();
    db.check_invariants();
    return db;
}

DeviceDB DeviceDB::load(const std::string &path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot open " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return load_bytes(bytes);
}

uint64_t DeviceDB::device_hash() const
{
    auto bytes = save_bytes();
    return fnv1a64(bytes.data(), bytes.size());
}

namespace {
// Remote references are only ever onto channel wires; a target tile type
// lacking a channel wire at that index clips the pip.
bool resolve_ref(const DeviceDB &db, int x, int y, const WireRef &ref, WireId &out)
{
    int tx = x + ref.dx, ty = y + ref.dy;
    if (!db.in_grid(tx, ty))
        return false;
    const TileType &t = db.tile(tx, ty);
    if (ref.index < 0 || size_t(ref.index) >= t.wires.size())
        return false;
    if (!ref.local()) {
        WireClass cls = t.wires[size_t(ref.index)].cls;
        if (cls != WireClass::CHAN_H && cls != WireClass::CHAN_V)
            return false;
    }
    out = WireId{int16_t(tx), int16_t(ty), ref.index};
    return true;
}
} // namespace

void DeviceDB::build_index()
{
    int W = width(), H = height();
    wire_base_.assign(size_t(W) * size_t(H) + 1, 0);
    int64_t acc = 0;
    for (int y = 0; y < H; y++)
        for (int x = 0; x < W; x++) {
            wire_base_[size_t(y) * size_t(W) + size_t(x)] = acc;
            acc += int64_t(tile(x, y).wires.size());
        }
    wire_base_[size_t(W) * size_t(H)] = acc;
    total_wires_ = acc;

    wire_name_idx_.clear();
    for (const auto &t : tile_types) {
        std::unordered_map<std::string, int32_t> m;
        for (size_t i = 0; i < t.wires.size(); i++)
            m.emplace(t.wires[i].name, int32_t(i));
        wire_name_idx_.push_back(std::move(m));
    }

    downhill_.assign(size_t(total_wires_), {});
    uphill_.assign(size_t(total_wires_), {});
    for (int y = 0; y < H; y++)
        for (int x = 0; x < W; x++) {
            const TileType &t = tile(x, y);
            for (size_t i = 0; i < t.pips.size(); i++) {
                WireId src, dst;
                if (!resolve_ref(*this, x, y, t.pips[i].src, src))
                    continue;
                if (!resolve_ref(*this, x, y, t.pips[i].dst, dst))
                    continue;
                PipId pip{int16_t(x), int16_t(y), int32_t(i)};
                downhill_[size_t(wire_flat(src))].push_back({pip, dst, t.pips[i].delay_ps});
                uphill_[size_t(wire_flat(dst))].push_back({pip, src, t.pips[i].delay_ps});
            }
        }
    auto by_pip = [](const Adj &a, const Adj &b) { return a.pip < b.pip; };
    for (auto &v : downhill_)
        std::sort(v.begin(), v.end(), by_pip);
    for (auto &v : uphill_)
        std::sort(v.begin(), v.end(), by_pip);
}

bool DeviceDB::wire_exists(WireId w) const
{
    return in_grid(w.x, w.y) && w.index >= 0 && size_t(w.index) < tile(w.x, w.y).wires.size();
}

std::string DeviceDB::local_wire_name(WireId w) const
{
    if (!wire_exists(w))
        throw UnknownWire("wire does not exist");
    return tile(w.x, w.y).wires[size_t(w.index)].name;
}

std::string DeviceDB::wire_name(WireId w) const
{
    return str_format("X%dY%d_%s", int(w.x), int(w.y), local_wire_name(w).c_str());
}

WireClass DeviceDB::wire_class(WireId w) const
{
    if (!wire_exists(w))
        throw UnknownWire("wire does not exist");
    return tile(w.x, w.y).wires[size_t(w.index)].cls;
}

int32_t DeviceDB::wire_delay(WireId w) const
{
    if (!wire_exists(w))
        throw UnknownWire("wire does not exist");
    return tile(w.x, w.y).wires[size_t(w.index)].delay_ps;
}

std::optional<WireId> DeviceDB::wire_by_name(const std::string &name) const
{
    if (name.size() < 4 || name[0] != 'X')
        return std::nullopt;
    size_t ypos = name.find('Y');
    size_t upos = name.find('_');
    if (ypos == std::string::npos || upos == std::string::npos || upos < ypos)
        return std::nullopt;
    int x, y;
    try {
        x = std::stoi(name.substr(1, ypos - 1));
        y = std::stoi(name.substr(ypos + 1, upos - ypos - 1));
    } catch (...) {
        return std::nullopt;
    }
    if (!in_grid(x, y))
        return std::nullopt;
    const auto &m = wire_name_idx_[size_t(grid[size_t(y) * width() + x])];
    auto it = m.find(name.substr(upos + 1));
    if (it == m.end())
        return std::nullopt;
    return WireId{int16_t(x), int16_t(y), it->second};
}

bool DeviceDB::pip_exists(PipId p) const
{
    if (!in_grid(p.x, p.y))
        return false;
    const TileType &t = tile(p.x, p.y);
    if (p.index < 0 || size_t(p.index) >= t.pips.size())
        return false;
    WireId tmp;
    return resolve_ref(*this, p.x, p.y, t.pips[size_t(p.index)].src, tmp) &&
           resolve_ref(*this, p.x, p.y, t.pips[size_t(p.index)].dst, tmp);
}

WireId DeviceDB::pip_src(PipId p) const
{
    WireId out;
    if (!in_grid(p.x, p.y) || p.index < 0 || size_t(p.index) >= tile(p.x, p.y).pips.size() ||
        !resolve_ref(*this, p.x, p.y, tile(p.x, p.y).pips[size_t(p.index)].src, out))
        throw Error("pip does not exist");
    return out;
}

WireId DeviceDB::pip_dst(PipId p) const
{
    WireId out;
    if (!in_grid(p.x, p.y) || p.index < 0 || size_t(p.index) >= tile(p.x, p.y).pips.size() ||
        !resolve_ref(*this, p.x, p.y, tile(p.x, p.y).pips[size_t(p.index)].dst, out))
        throw Error("pip does not exist");
    return out;
}

PipClass DeviceDB::pip_class(PipId p) const { return tile(p.x, p.y).pips[size_t(p.index)].cls; }

int32_t DeviceDB::pip_delay(PipId p) const { return tile(p.x, p.y).pips[size_t(p.index)].delay_ps; }

std::string DeviceDB::pip_name(PipId p) const
{
    WireId src = pip_src(p), dst = pip_dst(p);
    auto end_name = [&](WireId w) {
        if (w.x == p.x && w.y == p.y)
            return local_wire_name(w);
        return wire_name(w);
    };
    return str_format("X%dY%d.pip.%s.%s", int(p.x), int(p.y), end_name(dst).c_str(), end_name(src).c_str());
}

const std::vector<DeviceDB::Adj> &DeviceDB::downhill(WireId w) const
{
    if (!wire_exists(w))
        throw UnknownWire("wire does not exist");
    return downhill_[size_t(wire_flat(w))];
}

const std::vector<DeviceDB::Adj> &DeviceDB::uphill(WireId w) const
{
    if (!wire_exists(w))
        throw UnknownWire("wire does not exist");
    return uphill_[size_t(wire_flat(w))];
}

bool DeviceDB::bel_exists(BelId b) const
{
    return in_grid(b.x, b.y) && b.index >= 0 && size_t(b.index) < tile(b.x, b.y).bels.size();
}

BelKind DeviceDB::bel_kind(BelId b) const
{
    if (!bel_exists(b))
        throw Error("bel does not exist");
    return tile(b.x, b.y).bels[size_t(b.index)].kind;
}

std::string DeviceDB::bel_name(BelId b) const
{
    if (!bel_exists(b))
        throw Error("bel does not exist");
    return str_format("X%dY%d.%s", int(b.x), int(b.y), tile(b.x, b.y).bels[size_t(b.index)].name.c_str());
}

WireId DeviceDB::bel_pin_wire(BelId b, const std::string &pin) const
{
    if (!bel_exists(b))
        throw Error("bel does not exist");
    const LocalBel &bel = tile(b.x, b.y).bels[size_t(b.index)];
    for (const auto &p : bel.pins)
        if (p.name == pin) {
            if (p.wire < 0)
                return GLOBAL_CLOCK_WIRE;
            return WireId{b.x, b.y, p.wire};
        }
    throw UnknownPin("no pin '" + pin + "' on bel " + bel_name(b));
}

std::vector<BelId> DeviceDB::all_bels() const
{
    std::vector<BelId> out;
    for (int y = 0; y < height(); y++)
        for (int x = 0; x < width(); x++)
            for (size_t i = 0; i < tile(x, y).bels.size(); i++)
                out.push_back(BelId{int16_t(x), int16_t(y), int32_t(i)});
    return out;
}

std::vector<std::pair<std::string, BelId>> DeviceDB::pad_list() const
{
    std::vector<std::pair<std::string, BelId>> out;
    int idx = 0;
    for (BelId b : all_bels())
        if (bel_kind(b) == BelKind::PAD)
            out.emplace_back("PAD" + std::to_string(idx++), b);
    return out;
}

std::optional<BelId> DeviceDB::pad_by_name(const std::string &name) const
{
    for (const auto &[n, b] : pad_list())
        if (n == name)
            return b;
    return std::nullopt;
}

int64_t DeviceDB::wire_flat(WireId w) const
{
    return wire_base_[size_t(w.y) * size_t(width()) + size_t(w.x)] + w.index;
}

WireId DeviceDB::wire_unflat(int64_t idx) const
{
    auto it = std::upper_bound(wire_base_.begin(), wire_base_.end(), idx);
    size_t pos = size_t(it - wire_base_.begin()) - 1;
    return WireId{int16_t(pos % size_t(width())), int16_t(pos / size_t(width())), int32_t(idx - wire_base_[pos])};
}

ExpandedTile DeviceDB::expand_tile_instance(int x, int y) const
{
    if (!in_grid(x, y))
        throw OutOfGrid(str_format("tile (%d, %d) outside %dx%d grid", x, y, width(), height()));
    ExpandedTile out;
    const TileType &t = tile(x, y);
    for (size_t i = 0; i < t.wires.size(); i++) {
        WireId w{int16_t(x), int16_t(y), int32_t(i)};
        out.wires.emplace_back(w, wire_name(w));
    }
    for (size_t i = 0; i < t.pips.size(); i++) {
        WireId src, dst;
        if (!resolve_ref(*this, x, y, t.pips[i].src, src))
            continue;
        if (!resolve_ref(*this, x, y, t.pips[i].dst, dst))
            continue;
        out.pips.push_back({PipId{int16_t(x), int16_t(y), int32_t(i)}, src, dst, t.pips[i].cls, t.pips[i].delay_ps});
    }
    for (size_t i = 0; i < t.bels.size(); i++)
        out.bels.emplace_back(BelId{int16_t(x), int16_t(y), int32_t(i)}, t.bels[i].kind);
    return out;
}

int64_t DeviceDB::pip_count() const
{
    int64_t n = 0;
    for (const auto &v : downhill_)
        n += int64_t(v.size());
    return n;
}

int64_t DeviceDB::bel_count() const
{
    int64_t n = 0;
    for (int y = 0; y < height(); y++)
        for (int x = 0; x < width(); x++)
            n += int64_t(tile(x, y).bels.size());
    return n;
}

void DeviceDB::check_invariants() const
{
    params.validate();
    if (grid.size() != size_t(width()) * size_t(height()))
        throw InvariantViolation("grid size mismatch");
    for (int32_t g : grid)
        if (g < 0 || size_t(g) >= tile_types.size())
            throw InvariantViolation("grid entry indexes no tile type");
    for (const auto &t : tile_types) {
        std::map<std::string, int> names;
        for (const auto &w : t.wires)
            if (++names[w.name] > 1)
                throw InvariantViolation("duplicate wire name " + w.name + " in tile type");
        for (const auto &p : t.pips) {
            if (p.src == p.dst)
                throw InvariantViolation("self-loop pip in tile type");
            if (p.delay_ps < 0)
                throw InvariantViolation("negative pip delay");
        }
        for (const auto &b : t.bels)
            for (const auto &pin : b.pins)
                if (pin.wire >= 0 && size_t(pin.wire) >= t.wires.size())
                    throw InvariantViolation("bel pin maps to no local wire");
    }
    // Expanded graph: every surviving pip endpoint must be a real wire and
    // never a self-loop. resolve_ref guarantees existence; check loops.
    for (int y = 0; y < height(); y++)
        for (int x = 0; x < width(); x++)
            for (const auto &pi : expand_tile_instance(x, y).pips)
                if (pi.src == pi.dst)
                    throw InvariantViolation("self-loop pip after expansion");
}

void BindingState::bind_wire(WireId w, int32_t net)
{
    auto [it, inserted] = wire_to_net_.emplace(w, net);
    if (!inserted && it->second != net)
        throw Error("wire already bound to another net");
}

void BindingState::unbind_wire(WireId w)
{
    if (wire_to_net_.erase(w) == 0)
        throw Error("unbinding unbound wire");
}

int32_t BindingState::wire_net(WireId w) const
{
    auto it = wire_to_net_.find(w);
    return it == wire_to_net_.end() ? -1 : it->second;
}

void BindingState::bind_pip(PipId p, int32_t net)
{
    auto [it, inserted] = pip_to_net_.emplace(p, net);
    if (!inserted && it->second != net)
        throw Error("pip already bound to another net");
}

void BindingState::unbind_pip(PipId p)
{
    if (pip_to_net_.erase(p) == 0)
        throw Error("unbinding unbound pip");
}

int32_t BindingState::pip_net(PipId p) const
{
    auto it = pip_to_net_.find(p);
    return it == pip_to_net_.end() ? -1 : it->second;
}

void BindingState::bind_bel(BelId b, const BoundCell &cell)
{
    auto [it, inserted] = bel_to_cell_.emplace(b, cell);
    if (!inserted)
        throw Error("bel already bound");
}

void BindingState::unbind_bel(BelId b)
{
    if (bel_to_cell_.erase(b) == 0)
        throw Error("unbinding unbound bel");
}

const BindingState::BoundCell *BindingState::bel_cell(BelId b) const
{
    auto it = bel_to_cell_.find(b);
    return it == bel_to_cell_.end() ? nullptr : &it->second;
}

std::vector<std::string> BindingState::audit(const DeviceDB &db) const
{
    std::vector<std::string> diags;
    for (const auto &[pip, net] : pip_to_net_) {
        if (!db.pip_exists(pip)) {
            diags.push_back("bound pip does not exist");
            continue;
        }
        if (wire_net(db.pip_src(pip)) != net)
            diags.push_back("pip " + db.pip_name(pip) + " source not bound to its net");
        if (wire_net(db.pip_dst(pip)) != net)
            diags.push_back("pip " + db.pip_name(pip) + " destination not bound to its net");
    }
    for (const auto &[wire, net] : wire_to_net_)
        if (wire != GLOBAL_CLOCK_WIRE && !db.wire_exists(wire))
            diags.push_back("bound wire does not exist");
    for (const auto &[bel, cell] : bel_to_cell_)
        if (!db.bel_exists(bel))
            diags.push_back("bound bel does not exist");
    return diags;
}

bool check_bel_validity(const DeviceDB &db, const BindingState &state, const BindingState::BoundCell &cell, BelId bel)
{
    if (!db.bel_exists(bel))
        return false;
    if (db.bel_kind(bel) != cell.kind)
        return false;
    if (state.bel_cell(bel) != nullptr)
        return false;
    if (cell.kind == BelKind::LUTFF && cell.ff_enable) {
        const TileType &t = db.tile(bel.x, bel.y);
        for (size_t i = 0; i < t.bels.size(); i++) {
            if (int32_t(i) == bel.index)
                continue;
            const auto *other = state.bel_cell(BelId{bel.x, bel.y, int32_t(i)});
            if (other && other->kind == BelKind::LUTFF && other->ff_enable && other->clock_net != cell.clock_net)
                return false;
        }
    }
    return true;
}

} // namespace ipnr
