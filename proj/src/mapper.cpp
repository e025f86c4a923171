#include "sctsa/mapper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "nlohmann/json.hpp"
#include "sctsa/csv.hpp"
#include "sctsa/errors.hpp"
#include "sctsa/rng.hpp"

namespace sctsa {

std::size_t Cover::cube_count() const {
    std::size_t total = 1;
    for (const auto& iv : dims) total *= iv.size();
    return total;
}

std::vector<int> Cover::cube_index(std::size_t cube) const {
    std::vector<int> idx(dims.size());
    for (std::size_t d = dims.size(); d-- > 0;) {
        idx[d] = static_cast<int>(cube % dims[d].size());
        cube /= dims[d].size();
    }
    return idx;
}

bool Cover::cube_contains(std::size_t cube, const double* point) const {
    for (std::size_t d = dims.size(); d-- > 0;) {
        const auto& ivs = dims[d];
        const std::size_t i = cube % ivs.size();
        cube /= ivs.size();
        if (!ivs[i].contains(point[d])) return false;
    }
    return true;
}

Cover build_cover(const Embedding& lens, int intervals, double overlap) {
    if (intervals < 1) throw config_error("cover needs at least 1 interval per dimension");
    if (!(overlap > 0.0 && overlap < 1.0)) throw config_error("cover overlap must be in (0, 1)");
    Cover cover;
    cover.intervals = intervals;
    cover.overlap = overlap;
    cover.dims.resize(lens.k);
    for (std::size_t d = 0; d < lens.k; ++d) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < lens.n; ++i) {
            lo = std::min(lo, lens.at(i, d));
            hi = std::max(hi, lens.at(i, d));
        }
        auto& ivs = cover.dims[d];
        const double range = hi - lo;
        if (range <= 0.0 || intervals == 1) {
            ivs.push_back({lo, hi});
            continue;
        }
        // R intervals of length len with consecutive intervals sharing
        // fraction g of their length: R*len - (R-1)*g*len = range.
        const int r = intervals;
        const double len = range / (r - (r - 1) * overlap);
        const double stride = len * (1.0 - overlap);
        ivs.resize(static_cast<std::size_t>(r));
        for (int i = 0; i < r; ++i) {
            ivs[static_cast<std::size_t>(i)].lo = lo + i * stride;
            ivs[static_cast<std::size_t>(i)].hi = lo + i * stride + len;
        }
        ivs.front().lo = lo;
        ivs.back().hi = hi;  // guard the max point against rounding
    }
    return cover;
}

std::vector<std::pair<std::size_t, std::vector<std::uint32_t>>> cover_memberships(
    const Cover& cover, const Embedding& lens) {
    std::map<std::size_t, std::vector<std::uint32_t>> cubes;
    std::vector<double> point(lens.k);
    // Per-dimension interval hits combined into cube ids.
    std::vector<std::vector<std::size_t>> hits(lens.k);
    for (std::size_t i = 0; i < lens.n; ++i) {
        for (std::size_t d = 0; d < lens.k; ++d) {
            point[d] = lens.at(i, d);
            hits[d].clear();
            for (std::size_t s = 0; s < cover.dims[d].size(); ++s)
                if (cover.dims[d][s].contains(point[d])) hits[d].push_back(s);
        }
        // Cartesian product of hits.
        std::vector<std::size_t> cursor(lens.k, 0);
        for (;;) {
            std::size_t cube = 0;
            for (std::size_t d = 0; d < lens.k; ++d)
                cube = cube * cover.dims[d].size() + hits[d][cursor[d]];
            cubes[cube].push_back(static_cast<std::uint32_t>(i));
            std::size_t d = lens.k;
            while (d-- > 0) {
                if (++cursor[d] < hits[d].size()) break;
                cursor[d] = 0;
                if (d == 0) goto next_point;
            }
            if (lens.k == 0) break;
        }
    next_point:;
    }
    return {cubes.begin(), cubes.end()};
}

namespace {

struct UnionFind {
    std::vector<std::uint32_t> parent;
    std::vector<int> t_min, t_max;

    explicit UnionFind(const std::vector<int>& times) {
        parent.resize(times.size());
        std::iota(parent.begin(), parent.end(), 0u);
        t_min = times;
        t_max = times;
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    // Merge if the united timestamp span stays within tau.
    bool merge(std::uint32_t a, std::uint32_t b, int tau) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        const int lo = std::min(t_min[a], t_min[b]);
        const int hi = std::max(t_max[a], t_max[b]);
        if (tau >= 0 && hi - lo > tau) return false;
        parent[b] = a;
        t_min[a] = lo;
        t_max[a] = hi;
        return true;
    }
};

struct PairEntry {
    double dist;
    std::uint32_t a, b;  // local indices
};

}  // namespace

std::vector<std::vector<std::uint32_t>> cluster_cube(const std::vector<std::uint32_t>& points,
                                                     const SymMatrix& d,
                                                     const std::vector<int>& timestamps, int tau,
                                                     const ClusterParams& cp) {
    const std::size_t n = points.size();
    if (n == 0) throw data_error("cluster_cube: empty point set");
    std::vector<int> times(n);
    for (std::size_t i = 0; i < n; ++i) times[i] = timestamps[points[i]];

    std::vector<PairEntry> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) {
            if (!within_tau(times[i], times[j], tau)) continue;  // infinite, never merged
            pairs.push_back({d(points[i], points[j]), i, j});
        }
    std::sort(pairs.begin(), pairs.end(), [](const PairEntry& x, const PairEntry& y) {
        if (x.dist != y.dist) return x.dist < y.dist;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });

    // Pass 1: collect accepted single-linkage merge heights.
    std::vector<double> heights;
    {
        UnionFind uf(times);
        for (const auto& p : pairs)
            if (uf.merge(p.a, p.b, tau)) heights.push_back(p.dist);
    }

    double cut = std::numeric_limits<double>::infinity();
    if (cp.cut == ClusterCut::fixed) {
        cut = cp.fixed_threshold;
    } else if (!heights.empty()) {
        const double lo = heights.front();
        const double hi = heights.back();  // heights are ascending
        if (hi > lo) {
            const int bins = std::max(cp.histogram_bins, 2);
            std::vector<int> histo(static_cast<std::size_t>(bins), 0);
            for (const double h : heights) {
                auto b = static_cast<std::size_t>((h - lo) / (hi - lo) * bins);
                if (b >= static_cast<std::size_t>(bins)) b = static_cast<std::size_t>(bins) - 1;
                ++histo[b];
            }
            for (std::size_t b = 0; b < histo.size(); ++b)
                if (histo[b] == 0) {
                    cut = lo + (hi - lo) * static_cast<double>(b) / bins;
                    break;
                }
        }
    }

    UnionFind uf(times);
    for (const auto& p : pairs) {
        if (p.dist >= cut) break;
        uf.merge(p.a, p.b, tau);
    }
    std::map<std::uint32_t, std::vector<std::uint32_t>> groups;
    for (std::uint32_t i = 0; i < n; ++i) groups[uf.find(i)].push_back(points[i]);
    std::vector<std::vector<std::uint32_t>> out;
    out.reserve(groups.size());
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    // Deterministic rank: by smallest member index.
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

MapperGraph assemble_graph(const std::vector<std::pair<std::size_t, std::vector<std::uint32_t>>>&
                               clusters_by_cube,
                           const std::vector<int>& timestamps, int tau) {
    MapperGraph g;
    for (const auto& [cube, members] : clusters_by_cube) {
        MapperNode node;
        node.id = static_cast<int>(g.nodes.size());
        node.cube = cube;
        node.members = members;
        int lo = timestamps[members.front()], hi = lo;
        std::map<int, int> freq;
        for (const auto m : members) {
            lo = std::min(lo, timestamps[m]);
            hi = std::max(hi, timestamps[m]);
            ++freq[timestamps[m]];
        }
        node.t_min = lo;
        node.t_max = hi;
        node.t_mode = lo;
        int best = 0;
        for (const auto& [t, c] : freq)
            if (c > best) {
                best = c;
                node.t_mode = t;
            }
        g.nodes.push_back(std::move(node));
    }

    std::map<std::uint32_t, std::vector<int>> point_nodes;
    for (const auto& node : g.nodes)
        for (const auto m : node.members) point_nodes[m].push_back(node.id);

    std::map<std::pair<int, int>, int> shared;
    for (const auto& [pt, ids] : point_nodes)
        for (std::size_t a = 0; a < ids.size(); ++a)
            for (std::size_t b = a + 1; b < ids.size(); ++b)
                ++shared[{std::min(ids[a], ids[b]), std::max(ids[a], ids[b])}];

    for (const auto& [key, count] : shared) {
        const auto& u = g.nodes[static_cast<std::size_t>(key.first)];
        const auto& v = g.nodes[static_cast<std::size_t>(key.second)];
        const int lo = std::min(u.t_min, v.t_min);
        const int hi = std::max(u.t_max, v.t_max);
        if (tau >= 0 && hi - lo > tau) continue;
        g.edges.push_back({key.first, key.second, count});
    }
    return g;
}

MapperGraph build_mapper(const Embedding& lens, const SymMatrix& d,
                         const std::vector<int>& timestamps, const MapperParams& p) {
    if (lens.n != d.size() || lens.n != timestamps.size())
        throw data_error("mapper inputs disagree on point count");
    const Cover cover = build_cover(lens, p.intervals, p.overlap);
    const auto memberships = cover_memberships(cover, lens);
    std::vector<std::pair<std::size_t, std::vector<std::uint32_t>>> clusters;
    for (const auto& [cube, pts] : memberships) {
        auto cs = cluster_cube(pts, d, timestamps, p.tau, p.cluster);
        for (auto& c : cs) clusters.emplace_back(cube, std::move(c));
    }
    return assemble_graph(clusters, timestamps, p.tau);
}

void layout_graph(MapperGraph& g, std::uint64_t seed, int iterations) {
    const std::size_t n = g.nodes.size();
    if (n == 0) return;
    if (n == 1) {
        g.nodes[0].x = 0.0;
        g.nodes[0].y = 0.0;
        return;
    }
    // Fruchterman-Reingold with seeded init and a fixed cooling schedule.
    const double area = static_cast<double>(n);
    const double k = std::sqrt(area / static_cast<double>(n));  // rest length 1
    Rng rng(seed);
    std::vector<double> x(n), y(n), dx(n), dy(n);
    const double side = std::sqrt(area);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = (rng.uniform() - 0.5) * side;
        y[i] = (rng.uniform() - 0.5) * side;
    }
    double temp = side / 4.0;
    const double cool = std::pow(1e-3, 1.0 / std::max(iterations, 1));
    for (int it = 0; it < iterations; ++it) {
        std::fill(dx.begin(), dx.end(), 0.0);
        std::fill(dy.begin(), dy.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                double ex = x[i] - x[j], ey = y[i] - y[j];
                double dist2 = ex * ex + ey * ey;
                if (dist2 < 1e-12) {  // deterministic nudge for coincident nodes
                    ex = 1e-6 * static_cast<double>(i - j);
                    ey = 1e-6;
                    dist2 = ex * ex + ey * ey;
                }
                const double dist = std::sqrt(dist2);
                const double rep = k * k / dist;
                dx[i] += ex / dist * rep;
                dy[i] += ey / dist * rep;
                dx[j] -= ex / dist * rep;
                dy[j] -= ey / dist * rep;
            }
        for (const auto& e : g.edges) {
            const auto a = static_cast<std::size_t>(e.u), b = static_cast<std::size_t>(e.v);
            double ex = x[a] - x[b], ey = y[a] - y[b];
            double dist = std::sqrt(ex * ex + ey * ey);
            if (dist < 1e-9) continue;
            const double attr = dist * dist / k;
            dx[a] -= ex / dist * attr;
            dy[a] -= ey / dist * attr;
            dx[b] += ex / dist * attr;
            dy[b] += ey / dist * attr;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double mag = std::sqrt(dx[i] * dx[i] + dy[i] * dy[i]);
            if (mag > 0.0) {
                const double step = std::min(mag, temp);
                x[i] += dx[i] / mag * step;
                y[i] += dy[i] / mag * step;
            }
        }
        temp *= cool;
    }
    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cx += x[i];
        cy += y[i];
    }
    cx /= static_cast<double>(n);
    cy /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.nodes[i].x = x[i] - cx;
        g.nodes[i].y = y[i] - cy;
    }
}

void save_mapper_json(const MapperGraph& g, const std::filesystem::path& path) {
    nlohmann::json j;
    j["schema"] = "sctsa.mapper/1";
    j["directed"] = false;
    auto& nodes = j["nodes"] = nlohmann::json::array();
    for (const auto& n : g.nodes) {
        nlohmann::json e;
        e["id"] = n.id;
        e["cube"] = n.cube;
        e["members"] = n.members;
        e["size"] = n.members.size();
        e["t_min"] = n.t_min;
        e["t_max"] = n.t_max;
        e["t_mode"] = n.t_mode;
        e["x"] = n.x;
        e["y"] = n.y;
        nodes.push_back(std::move(e));
    }
    auto& links = j["links"] = nlohmann::json::array();
    for (const auto& e : g.edges)
        links.push_back({{"source", e.u}, {"target", e.v}, {"shared", e.shared}});
    write_file_atomic(path, j.dump(2) + "\n");
}

void save_mapper_dot(const MapperGraph& g, const std::filesystem::path& path) {
    static const char* palette[] = {"#a6cee3", "#1f78b4", "#b2df8a", "#33a02c",
                                    "#fb9a99", "#e31a1c", "#fdbf6f", "#ff7f00",
                                    "#cab2d6", "#6a3d9a", "#ffff99", "#b15928"};
    std::string out = "graph mapper {\n  node [style=filled];\n";
    for (const auto& n : g.nodes) {
        const int t = n.t_mode;
        const char* color = palette[static_cast<std::size_t>(t < 0 ? 0 : t) % 12];
        out += "  n" + std::to_string(n.id) + " [label=\"" + std::to_string(n.id) + " (" +
               std::to_string(n.members.size()) + ")\", fillcolor=\"" + color + "\"];\n";
    }
    for (const auto& e : g.edges)
        out += "  n" + std::to_string(e.u) + " -- n" + std::to_string(e.v) + ";\n";
    out += "}\n";
    write_file_atomic(path, out);
}

void save_mapper_csv(const MapperGraph& g, const std::filesystem::path& nodes_path,
                     const std::filesystem::path& edges_path) {
    CsvWriter nodes;
    nodes.field("id").field("cube").field("size").field("t_min").field("t_max").field("t_mode");
    nodes.field("x").field("y").field("members");
    nodes.end_row();
    for (const auto& n : g.nodes) {
        std::string members;
        for (std::size_t i = 0; i < n.members.size(); ++i) {
            if (i) members += ' ';
            members += std::to_string(n.members[i]);
        }
        nodes.field(static_cast<std::int64_t>(n.id))
            .field(static_cast<std::uint64_t>(n.cube))
            .field(n.members.size())
            .field(static_cast<std::int64_t>(n.t_min))
            .field(static_cast<std::int64_t>(n.t_max))
            .field(static_cast<std::int64_t>(n.t_mode))
            .field(n.x)
            .field(n.y)
            .field(members);
        nodes.end_row();
    }
    nodes.save(nodes_path);

    CsvWriter edges;
    edges.field("source").field("target").field("shared");
    edges.end_row();
    for (const auto& e : g.edges) {
        edges.field(static_cast<std::int64_t>(e.u))
            .field(static_cast<std::int64_t>(e.v))
            .field(static_cast<std::int64_t>(e.shared));
        edges.end_row();
    }
    edges.save(edges_path);
}

}  // namespace sctsa
