#include "kge/model.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <random>
#include <stdexcept>

namespace kge {

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::transe: return "transe";
        case ModelKind::distmult: return "distmult";
        case ModelKind::complex: return "complex";
        case ModelKind::hole: return "hole";
        case ModelKind::convkb: return "convkb";
    }
    return "transe";
}

ModelKind parse_model_kind(std::string_view name) {
    for (auto k : {ModelKind::transe, ModelKind::distmult, ModelKind::complex, ModelKind::hole, ModelKind::convkb})
        if (to_string(k) == name) return k;
    throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

ModelParameters init_params(ModelKind kind, std::size_t k, std::uint64_t seed, std::uint32_t num_entities,
                            std::uint32_t num_relations, const ModelOptions& options) {
    if (k == 0) throw std::invalid_argument("embedding dimension k must be >= 1");
    if (num_entities == 0 || num_relations == 0) throw std::invalid_argument("entity and relation counts must be >= 1");
    if (options.transe_norm != 1 && options.transe_norm != 2) throw std::invalid_argument("TransE norm must be 1 or 2");

    ModelParameters p;
    p.kind = kind;
    p.k = k;
    p.width = kind == ModelKind::complex ? 2 * k : k;
    p.num_entities = num_entities;
    p.num_relations = num_relations;
    p.transe_norm = options.transe_norm;
    p.seed = seed;

    const double bound = 6.0 / std::sqrt(static_cast<double>(k));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-bound, bound);
    auto fill = [&](std::vector<double>& v, std::size_t n) {
        v.resize(n);
        for (auto& x : v) x = uni(rng);
    };
    fill(p.entities, std::size_t{num_entities} * p.width);
    fill(p.relations, std::size_t{num_relations} * p.width);
    if (kind == ModelKind::convkb) {
        if (options.num_filters == 0) throw std::invalid_argument("ConvKB needs at least one filter");
        p.num_filters = options.num_filters;
        fill(p.filters, p.num_filters * 4);
        fill(p.dense, p.num_filters * k);
    }
    if (kind == ModelKind::transe) {
        // relations are normalised once, entities after every update
        for (RelationId r = 0; r < num_relations; ++r) normalize_row(p.relation(r));
        for (EntityId e = 0; e < num_entities; ++e) normalize_entity(p, e);
    }
    return p;
}

void normalize_row(std::span<double> row) {
    double sq = 0;
    for (double x : row) sq += x * x;
    if (sq == 0) return;
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& x : row) x *= inv;
}

void normalize_entity(ModelParameters& params, EntityId e) { normalize_row(params.entity(e)); }

double transe_score(std::span<const double> h, std::span<const double> r, std::span<const double> t, int norm) {
    double acc = 0;
    if (norm == 1) {
        for (std::size_t i = 0; i < h.size(); ++i) acc += std::abs(h[i] + r[i] - t[i]);
        return -acc;
    }
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double d = h[i] + r[i] - t[i];
        acc += d * d;
    }
    return -std::sqrt(acc);
}

double distmult_score(std::span<const double> h, std::span<const double> r, std::span<const double> t) {
    double acc = 0;
    // h * t first so that swapping h and t is bit-exact
    for (std::size_t i = 0; i < h.size(); ++i) acc += r[i] * (h[i] * t[i]);
    return acc;
}

double complex_score(std::span<const double> h, std::span<const double> r, std::span<const double> t) {
    const std::size_t k = h.size() / 2;
    double acc = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double hr = h[i], hi = h[k + i], rr = r[i], ri = r[k + i], tr = t[i], ti = t[k + i];
        // Re(r * h * conj(t))
        acc += rr * (hr * tr + hi * ti) + ri * (hr * ti - hi * tr);
    }
    return acc;
}

void circular_correlation(std::span<const double> h, std::span<const double> t, std::span<double> out) {
    const std::size_t k = h.size();
    for (std::size_t i = 0; i < k; ++i) {
        double acc = 0;
        for (std::size_t j = 0; j < k; ++j) acc += h[j] * t[(j + i) % k];
        out[i] = acc;
    }
}

double hole_score(std::span<const double> h, std::span<const double> w, std::span<const double> t) {
    const std::size_t k = h.size();
    double acc = 0;
    for (std::size_t i = 0; i < k; ++i) {
        double corr = 0;
        for (std::size_t j = 0; j < k; ++j) corr += h[j] * t[(j + i) % k];
        acc += w[i] * corr;
    }
    return acc;
}

namespace {
std::mutex fftw_planner_mutex;  // FFTW planning is not thread safe
}

double hole_score_fft(std::span<const double> h, std::span<const double> w, std::span<const double> t) {
    const int k = static_cast<int>(h.size());
    const int bins = k / 2 + 1;
    std::vector<double> in(k), corr(k);
    std::vector<std::complex<double>> fh(bins), ft(bins);
    fftw_plan fwd, inv;
    {
        std::lock_guard lock(fftw_planner_mutex);
        fwd = fftw_plan_dft_r2c_1d(k, in.data(), reinterpret_cast<fftw_complex*>(fh.data()), FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(k, reinterpret_cast<fftw_complex*>(fh.data()), corr.data(), FFTW_ESTIMATE);
    }
    std::copy(h.begin(), h.end(), in.begin());
    fftw_execute_dft_r2c(fwd, in.data(), reinterpret_cast<fftw_complex*>(fh.data()));
    std::copy(t.begin(), t.end(), in.begin());
    fftw_execute_dft_r2c(fwd, in.data(), reinterpret_cast<fftw_complex*>(ft.data()));
    for (int i = 0; i < bins; ++i) fh[i] = std::conj(fh[i]) * ft[i];
    // c2r overwrites its input
    fftw_execute_dft_c2r(inv, reinterpret_cast<fftw_complex*>(fh.data()), corr.data());
    {
        std::lock_guard lock(fftw_planner_mutex);
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
    }
    double acc = 0;
    for (int i = 0; i < k; ++i) acc += w[i] * corr[i];
    // the unnormalised inverse transform carries the factor k
    return acc / k;
}

double convkb_score(std::span<const double> h, std::span<const double> r, std::span<const double> t,
                    std::span<const double> filters, std::span<const double> dense) {
    const std::size_t k = h.size();
    const std::size_t tau = filters.size() / 4;
    double acc = 0;
    for (std::size_t m = 0; m < tau; ++m) {
        const double wh = filters[4 * m], wr = filters[4 * m + 1], wt = filters[4 * m + 2], b = filters[4 * m + 3];
        const double* wd = dense.data() + m * k;
        for (std::size_t i = 0; i < k; ++i) {
            const double pre = wh * h[i] + wr * r[i] + wt * t[i] + b;
            if (pre > 0) acc += pre * wd[i];
        }
    }
    return acc;
}

double score(const ModelParameters& p, const Triple& tr) {
    auto h = p.entity(tr.subject);
    auto r = p.relation(tr.predicate);
    auto t = p.entity(tr.object);
    switch (p.kind) {
        case ModelKind::transe: return transe_score(h, r, t, p.transe_norm);
        case ModelKind::distmult: return distmult_score(h, r, t);
        case ModelKind::complex: return complex_score(h, r, t);
        case ModelKind::hole: return hole_score(h, r, t);
        case ModelKind::convkb: return convkb_score(h, r, t, p.filters, p.dense);
    }
    return 0;
}

Gradient gradient(const ModelParameters& p, const Triple& tr) {
    auto h = p.entity(tr.subject);
    auto r = p.relation(tr.predicate);
    auto t = p.entity(tr.object);
    const std::size_t w = p.width;
    const std::size_t k = p.k;
    Gradient g{tr, std::vector<double>(w, 0.0), std::vector<double>(w, 0.0), std::vector<double>(w, 0.0), {}, {}};

    switch (p.kind) {
        case ModelKind::transe: {
            if (p.transe_norm == 1) {
                for (std::size_t i = 0; i < w; ++i) {
                    const double d = h[i] + r[i] - t[i];
                    const double s = d > 0 ? 1.0 : d < 0 ? -1.0 : 0.0;
                    g.head[i] = -s;
                    g.relation[i] = -s;
                    g.tail[i] = s;
                }
            } else {
                double sq = 0;
                for (std::size_t i = 0; i < w; ++i) sq += (h[i] + r[i] - t[i]) * (h[i] + r[i] - t[i]);
                const double norm = std::sqrt(sq);
                if (norm > 0) {
                    for (std::size_t i = 0; i < w; ++i) {
                        const double d = (h[i] + r[i] - t[i]) / norm;
                        g.head[i] = -d;
                        g.relation[i] = -d;
                        g.tail[i] = d;
                    }
                }
            }
            break;
        }
        case ModelKind::distmult:
            for (std::size_t i = 0; i < w; ++i) {
                g.head[i] = r[i] * t[i];
                g.relation[i] = h[i] * t[i];
                g.tail[i] = r[i] * h[i];
            }
            break;
        case ModelKind::complex:
            for (std::size_t i = 0; i < k; ++i) {
                const double hr = h[i], hi = h[k + i], rr = r[i], ri = r[k + i], tr_ = t[i], ti = t[k + i];
                g.head[i] = rr * tr_ + ri * ti;
                g.head[k + i] = rr * ti - ri * tr_;
                g.relation[i] = hr * tr_ + hi * ti;
                g.relation[k + i] = hr * ti - hi * tr_;
                g.tail[i] = rr * hr - ri * hi;
                g.tail[k + i] = rr * hi + ri * hr;
            }
            break;
        case ModelKind::hole:
            circular_correlation(h, t, g.relation);
            for (std::size_t j = 0; j < k; ++j) {
                double gh = 0, gt = 0;
                for (std::size_t i = 0; i < k; ++i) {
                    gh += r[i] * t[(j + i) % k];
                    gt += r[i] * h[(j + k - i) % k];
                }
                g.head[j] = gh;
                g.tail[j] = gt;
            }
            break;
        case ModelKind::convkb: {
            const std::size_t tau = p.num_filters;
            g.filters.assign(tau * 4, 0.0);
            g.dense.assign(tau * k, 0.0);
            for (std::size_t m = 0; m < tau; ++m) {
                const double wh = p.filters[4 * m], wr = p.filters[4 * m + 1], wt = p.filters[4 * m + 2],
                             b = p.filters[4 * m + 3];
                for (std::size_t i = 0; i < k; ++i) {
                    const double pre = wh * h[i] + wr * r[i] + wt * t[i] + b;
                    if (pre <= 0) continue;  // ReLU subgradient at 0 is 0
                    const double wd = p.dense[m * k + i];
                    g.dense[m * k + i] = pre;
                    g.filters[4 * m] += wd * h[i];
                    g.filters[4 * m + 1] += wd * r[i];
                    g.filters[4 * m + 2] += wd * t[i];
                    g.filters[4 * m + 3] += wd;
                    g.head[i] += wd * wh;
                    g.relation[i] += wd * wr;
                    g.tail[i] += wd * wt;
                }
            }
            break;
        }
    }
    return g;
}

}  // namespace kge
