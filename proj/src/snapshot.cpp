#include "netform/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

namespace netform {

namespace {

constexpr char kMagic[4] = {'N', 'W', 'F', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int i = 0; i < 8; ++i)
        buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > buf.size()) throw FormatError("snapshot file truncated");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i]))
                 << (8 * i);
        pos += 4;
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i)
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i]))
                    << (8 * i);
        pos += 8;
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
};

} // namespace

void write_snapshot(const std::string& path, const VectorField& m,
                    const ScalarField& p, double time) {
    const Grid& g = m.grid;
    if (p.grid != g) throw DomainError("write_snapshot: grid mismatch");

    std::string buf;
    buf.append(kMagic, 4);
    put_u32(buf, kVersion);
    put_u32(buf, static_cast<std::uint32_t>(g.dim()));
    for (int a = 0; a < g.dim(); ++a)
        put_u32(buf, static_cast<std::uint32_t>(g.n(a)));
    for (int a = 0; a < g.dim(); ++a) put_f64(buf, g.extent(a));
    put_f64(buf, time);
    for (double v : p.values) put_f64(buf, v);
    for (int d = 0; d < g.dim(); ++d)
        for (double v : m.comp[d].values) put_f64(buf, v);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("write failed: " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());

    Reader r{buf};
    r.need(4);
    if (std::memcmp(buf.data(), kMagic, 4) != 0)
        throw FormatError("bad magic, expected \"NWF1\"");
    r.pos = 4;
    if (r.u32() != kVersion) throw FormatError("unsupported snapshot version");
    const std::uint32_t dim = r.u32();
    if (dim != 1 && dim != 2) throw FormatError("snapshot dim must be 1 or 2");

    std::array<int, 2> n{1, 1};
    std::array<double, 2> extent{0.0, 0.0};
    for (std::uint32_t a = 0; a < dim; ++a) {
        const std::uint32_t na = r.u32();
        if (na < 3 || na > (1u << 24)) throw FormatError("implausible axis size");
        n[a] = static_cast<int>(na);
    }
    for (std::uint32_t a = 0; a < dim; ++a) extent[a] = r.f64();

    Grid grid(static_cast<int>(dim), n, extent);
    const std::size_t count = grid.node_count();
    const std::size_t expect = r.pos + 8 + (1 + dim) * count * 8;
    if (buf.size() != expect) throw FormatError("payload length mismatch");

    const double time = r.f64();
    ScalarField p(grid);
    for (std::size_t i = 0; i < count; ++i) p[i] = r.f64();
    VectorField m(grid);
    for (std::uint32_t d = 0; d < dim; ++d)
        for (std::size_t i = 0; i < count; ++i) m.comp[d][i] = r.f64();
    return Snapshot{grid, std::move(m), std::move(p), time};
}

void write_trajectory(const std::string& dir, const Trajectory& traj) {
    std::filesystem::create_directories(dir);
    // stale snapshots from an earlier run would corrupt the time sequence
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (name.rfind("snap_", 0) == 0 &&
            name.size() > 4 && name.substr(name.size() - 4) == ".nwf")
            std::filesystem::remove(e.path());
    }
    char name[32];
    for (std::size_t i = 0; i < traj.snapshot_count(); ++i) {
        std::snprintf(name, sizeof name, "snap_%06zu.nwf", i);
        write_snapshot((std::filesystem::path(dir) / name).string(), traj.m[i],
                       traj.p[i], traj.times[i]);
    }
}

Trajectory read_trajectory(const std::string& dir) {
    std::vector<std::filesystem::path> files;
    std::error_code ec;
    for (const auto& e : std::filesystem::directory_iterator(dir, ec)) {
        const std::string name = e.path().filename().string();
        if (name.size() > 9 && name.rfind("snap_", 0) == 0 &&
            name.substr(name.size() - 4) == ".nwf")
            files.push_back(e.path());
    }
    if (ec) throw IoError("cannot read directory: " + dir);
    if (files.empty()) throw IoError("no snapshot files in: " + dir);
    std::sort(files.begin(), files.end());

    Snapshot first = read_snapshot(files[0].string());
    Trajectory traj(first.grid);
    traj.times.push_back(first.time);
    traj.m.push_back(std::move(first.m));
    traj.p.push_back(std::move(first.p));
    for (std::size_t i = 1; i < files.size(); ++i) {
        Snapshot s = read_snapshot(files[i].string());
        if (s.grid != traj.grid)
            throw FormatError("snapshot grids differ within the trajectory");
        if (s.time <= traj.times.back())
            throw FormatError("snapshot times are not strictly increasing");
        traj.times.push_back(s.time);
        traj.m.push_back(std::move(s.m));
        traj.p.push_back(std::move(s.p));
    }
    return traj;
}

} // namespace netform
