#include "mokit/sup_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mokit/errors.hpp"

namespace mokit {

void SupSolverConfig::validate() const {
    if (coarse_grid < 8) throw DomainError("solver: coarse_grid must be >= 8");
    if (refine_rounds == 0 || keep_best == 0) throw DomainError("solver: refine_rounds and keep_best must be positive");
    if (!(rel_tol > 0.0) || !(endpoint_margin > 0.0) || endpoint_margin >= 1.0 || !(overflow_cap > 0.0) ||
        !(equality_tol > 0.0)) {
        throw DomainError("solver: tolerances must be positive (and endpoint_margin < 1)");
    }
}

namespace detail {
namespace {

constexpr double kInvGolden = 0.6180339887498949;
constexpr double kInfD = std::numeric_limits<double>::infinity();

double clean(double v) { return std::isnan(v) ? -kInfD : v; }

struct Probe {
    double s;
    double v;
};

Probe golden_max(const Objective& g, double lo, double hi, const SupSolverConfig& cfg) {
    double a = lo, b = hi;
    double c = b - kInvGolden * (b - a);
    double d = a + kInvGolden * (b - a);
    double fc = clean(g(c)), fd = clean(g(d));
    for (std::size_t k = 0; k < cfg.refine_rounds; ++k) {
        if (b - a <= cfg.rel_tol * std::max(std::abs(a), std::abs(b))) break;
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvGolden * (b - a);
            fc = clean(g(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvGolden * (b - a);
            fd = clean(g(d));
        }
        if (fc == kInfD) return {c, fc};
        if (fd == kInfD) return {d, fd};
    }
    return fc >= fd ? Probe{c, fc} : Probe{d, fd};
}

// Indices of local maxima of vals (plateaus count), best first, at most k.
std::vector<std::size_t> local_maxima(const std::vector<double>& vals, std::size_t k) {
    std::vector<std::size_t> idx;
    const std::size_t n = vals.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (vals[i] == -kInfD) continue;
        const bool left = i == 0 || vals[i] >= vals[i - 1];
        const bool right = i + 1 == n || vals[i] >= vals[i + 1];
        if (left && right) idx.push_back(i);
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
    if (idx.size() > k) idx.resize(k);
    return idx;
}

// Scans pts, refines the best local maxima, merges into res. Returns false
// when an infinite value was met (res then holds it).
bool scan_and_refine(const Objective& g, const std::vector<double>& pts, const SupSolverConfig& cfg, SupResult& res,
                     std::vector<double>* vals_out = nullptr) {
    std::vector<double> vals(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        vals[i] = clean(g(pts[i]));
        if (vals[i] == kInfD) {
            res = {kInfD, pts[i], true, {pts[i]}};
            return false;
        }
    }
    for (std::size_t i : local_maxima(vals, cfg.keep_best)) {
        Probe best{pts[i], vals[i]};
        const double lo = pts[i == 0 ? 0 : i - 1];
        const double hi = pts[std::min(i + 1, pts.size() - 1)];
        if (hi > lo) {
            const Probe p = golden_max(g, lo, hi, cfg);
            if (p.v == kInfD) {
                res = {kInfD, p.s, true, {p.s}};
                return false;
            }
            if (p.v > best.v) best = p;
        }
        res.maxima.push_back(best.s);
        if (best.v > res.value || (best.v == res.value && best.s > res.argmax)) {
            res.value = best.v;
            res.argmax = best.s;
        }
    }
    if (vals_out) *vals_out = std::move(vals);
    return true;
}

}  // namespace

std::vector<double> scan_grid(double S, std::size_t n) {
    const std::size_t half = std::max<std::size_t>(n / 2, 4);
    std::vector<double> pts;
    pts.reserve(2 * half + 1);
    for (std::size_t j = 0; j <= half; ++j) pts.push_back(S * static_cast<double>(j) / static_cast<double>(half));
    for (std::size_t j = 0; j < half; ++j) {
        pts.push_back(S * std::pow(10.0, -12.0 + 12.0 * static_cast<double>(j) / static_cast<double>(half)));
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

SupResult sup_compact(const Objective& g, double S, const SupSolverConfig& cfg) {
    SupResult res;
    res.value = -kInfD;
    if (!(S > 0.0)) {
        res.value = clean(g(0.0));
        res.infinite = res.value == kInfD;
        res.maxima = {0.0};
        return res;
    }
    scan_and_refine(g, scan_grid(S, cfg.coarse_grid), cfg, res);
    return res;
}

SupResult sup_unbounded(const Objective& g, const SupSolverConfig& cfg) {
    SupResult best = sup_compact(g, 1.0, cfg);
    if (best.infinite) return best;

    const std::size_t seg = std::max<std::size_t>(8, cfg.coarse_grid / 16);
    std::size_t quiet = 0;
    int cap_hits = 0;
    double A = 1.0;
    while (A < 1e300) {
        const double B = 2.0 * A;
        std::vector<double> pts(seg + 1);
        for (std::size_t j = 0; j <= seg; ++j) pts[j] = A + (B - A) * static_cast<double>(j) / static_cast<double>(seg);

        // an inadmissible or undefined sample ends the admissible range
        std::size_t usable = pts.size();
        for (std::size_t j = 0; j < pts.size(); ++j) {
            const double v = g(pts[j]);
            if (std::isnan(v) || v == -kInfD) {
                usable = j;
                break;
            }
        }
        if (usable < 2) break;
        pts.resize(usable);

        const double before = best.value;
        SupResult seg_res;
        seg_res.value = -kInfD;
        if (!scan_and_refine(g, pts, cfg, seg_res)) return seg_res;
        if (seg_res.value > best.value) {
            best.value = seg_res.value;
            best.argmax = seg_res.argmax;
        }
        best.maxima.insert(best.maxima.end(), seg_res.maxima.begin(), seg_res.maxima.end());

        if (best.value > cfg.overflow_cap && ++cap_hits >= 2) {
            return {kInfD, best.argmax, true, {best.argmax}};
        }
        if (usable < seg + 1) break;

        const bool improved = best.value > before + cfg.rel_tol * (1.0 + std::abs(before));
        quiet = improved ? 0 : quiet + 1;
        A = B;

        if (quiet >= 40) {
            bool resumed = false;
            for (double s = A * 1e10; s < 1e300; s *= 1e10) {
                const double v = g(s);
                if (std::isnan(v) || v == -kInfD) break;
                if (v == kInfD || v > cfg.overflow_cap) return {kInfD, s, true, {s}};
                if (v > best.value + cfg.rel_tol * (1.0 + std::abs(best.value))) {
                    best.value = v;
                    best.argmax = s;
                    A = s;
                    quiet = 0;
                    resumed = true;
                    break;
                }
            }
            if (!resumed) break;
        }
    }
    return best;
}

}  // namespace detail
}  // namespace mokit
