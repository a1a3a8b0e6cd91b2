#include "jcl/contour.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace jcl {

namespace {

// Edge identifiers: horizontal edge (i,j)-(i,j+1) and vertical edge (i,j)-(i+1,j).
struct EdgeKey {
    int i = 0;
    int j = 0;
    bool vertical = false;
    friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

struct Segment {
    EdgeKey a, b;
};

double frac(double va, double vb, double level) {
    const double d = vb - va;
    if (d == 0.0) return 0.5;
    return std::clamp((level - va) / d, 0.0, 1.0);
}

}  // namespace

std::vector<IndexPolyline> marching_squares(const Eigen::MatrixXd& v, double level) {
    const int rows = int(v.rows());
    const int cols = int(v.cols());
    std::vector<IndexPolyline> out;
    if (rows < 2 || cols < 2) return out;

    std::map<EdgeKey, IndexPoint> points;
    auto edge_point = [&](const EdgeKey& k) {
        auto it = points.find(k);
        if (it != points.end()) return;
        IndexPoint p;
        if (k.vertical) {
            p = {k.i + frac(v(k.i, k.j), v(k.i + 1, k.j), level), double(k.j)};
        } else {
            p = {double(k.i), k.j + frac(v(k.i, k.j), v(k.i, k.j + 1), level)};
        }
        points.emplace(k, p);
    };

    std::vector<Segment> segs;
    for (int i = 0; i + 1 < rows; ++i) {
        for (int j = 0; j + 1 < cols; ++j) {
            const double v00 = v(i, j), v01 = v(i, j + 1), v11 = v(i + 1, j + 1), v10 = v(i + 1, j);
            if (!std::isfinite(v00) || !std::isfinite(v01) || !std::isfinite(v11) || !std::isfinite(v10)) continue;
            const int code = (v00 >= level ? 1 : 0) | (v01 >= level ? 2 : 0) | (v11 >= level ? 4 : 0) |
                             (v10 >= level ? 8 : 0);
            if (code == 0 || code == 15) continue;
            const EdgeKey bottom{i, j, false};      // (i,j)-(i,j+1)
            const EdgeKey top{i + 1, j, false};     // (i+1,j)-(i+1,j+1)
            const EdgeKey left{i, j, true};         // (i,j)-(i+1,j)
            const EdgeKey right{i, j + 1, true};    // (i,j+1)-(i+1,j+1)
            auto add = [&](EdgeKey a, EdgeKey b) {
                edge_point(a);
                edge_point(b);
                segs.push_back({a, b});
            };
            const bool center_in = 0.25 * (v00 + v01 + v11 + v10) >= level;
            switch (code) {
                case 1: case 14: add(left, bottom); break;
                case 2: case 13: add(bottom, right); break;
                case 3: case 12: add(left, right); break;
                case 4: case 11: add(right, top); break;
                case 6: case 9: add(bottom, top); break;
                case 7: case 8: add(left, top); break;
                case 5:  // v00 and v11 inside
                    if (center_in) { add(left, top); add(bottom, right); }
                    else { add(left, bottom); add(right, top); }
                    break;
                case 10:  // v01 and v10 inside
                    if (center_in) { add(left, bottom); add(right, top); }
                    else { add(left, top); add(bottom, right); }
                    break;
                default: break;
            }
        }
    }

    // Stitch: each edge point is shared by at most two segments.
    std::multimap<EdgeKey, std::size_t> by_edge;
    for (std::size_t s = 0; s < segs.size(); ++s) {
        by_edge.emplace(segs[s].a, s);
        by_edge.emplace(segs[s].b, s);
    }
    std::vector<bool> used(segs.size(), false);
    auto next_segment = [&](const EdgeKey& k) -> std::optional<std::size_t> {
        auto [lo, hi] = by_edge.equal_range(k);
        for (auto it = lo; it != hi; ++it)
            if (!used[it->second]) return it->second;
        return std::nullopt;
    };
    auto degree = [&](const EdgeKey& k) { return by_edge.count(k); };

    auto walk = [&](std::size_t start, EdgeKey from) {
        std::vector<EdgeKey> keys{from};
        std::size_t s = start;
        EdgeKey cur = from;
        while (true) {
            used[s] = true;
            cur = (segs[s].a == cur) ? segs[s].b : segs[s].a;
            keys.push_back(cur);
            auto nxt = next_segment(cur);
            if (!nxt) break;
            s = *nxt;
        }
        IndexPolyline line;
        for (const auto& k : keys) line.push_back(points.at(k));
        out.push_back(std::move(line));
    };

    // Open chains first, started from their ends, then the remaining loops.
    for (std::size_t s = 0; s < segs.size(); ++s) {
        if (used[s]) continue;
        if (degree(segs[s].a) == 1) walk(s, segs[s].a);
        else if (degree(segs[s].b) == 1) walk(s, segs[s].b);
    }
    for (std::size_t s = 0; s < segs.size(); ++s)
        if (!used[s]) walk(s, segs[s].a);
    return out;
}

std::vector<double> crossings_at_row(const std::vector<IndexPolyline>& lines, double row) {
    std::vector<double> cols;
    for (const auto& line : lines) {
        for (std::size_t k = 1; k < line.size(); ++k) {
            const auto& p = line[k - 1];
            const auto& q = line[k];
            const double lo = std::min(p.row, q.row), hi = std::max(p.row, q.row);
            if (row < lo || row > hi) continue;
            if (p.row == q.row) {
                // Segment lying on the row: report its endpoints.
                cols.push_back(p.col);
                cols.push_back(q.col);
                continue;
            }
            // Half-open in the direction of travel so shared vertices count once.
            if (row == q.row && k + 1 < line.size()) continue;
            const double w = (row - p.row) / (q.row - p.row);
            cols.push_back(p.col + w * (q.col - p.col));
        }
    }
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               cols.end());
    return cols;
}

std::vector<double> level_crossings(std::span<const double> x, std::span<const double> f, double level) {
    if (x.size() != f.size()) throw std::invalid_argument("level_crossings: size mismatch");
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
        const double a = f[k] - level, b = f[k + 1] - level;
        if (!std::isfinite(a) || !std::isfinite(b)) continue;
        if (a == 0.0) {
            out.push_back(x[k]);
            continue;
        }
        if ((a < 0.0) != (b < 0.0) && b != 0.0) out.push_back(x[k] + (x[k + 1] - x[k]) * a / (a - b));
    }
    if (!x.empty() && f.back() == level) out.push_back(x.back());
    std::sort(out.begin(), out.end());
    return out;
}

double axis_value(std::span<const double> axis, double fi, bool log_scale) {
    if (axis.empty()) throw std::invalid_argument("axis_value: empty axis");
    if (axis.size() == 1 || fi <= 0.0) return axis.front();
    const double last = double(axis.size() - 1);
    if (fi >= last) return axis.back();
    const auto k = std::size_t(std::floor(fi));
    const double w = fi - double(k);
    const double a = axis[k], b = axis[k + 1];
    if (log_scale && a > 0.0 && b > 0.0) return a * std::pow(b / a, w);
    return a + w * (b - a);
}

bool is_geometric(std::span<const double> axis) {
    if (axis.size() < 3) return axis.size() == 2 && axis[0] > 0.0 && axis[1] > 0.0;
    for (double a : axis)
        if (!(a > 0.0)) return false;
    const double r = axis[1] / axis[0];
    for (std::size_t k = 2; k < axis.size(); ++k)
        if (std::abs(axis[k] / axis[k - 1] - r) > 1e-9 * r) return false;
    return true;
}

}  // namespace jcl
