// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>

#include "kge/analytics.hpp"
#include "kge/checkpoint.hpp"
#include "kge/credibility.hpp"
#include "kge/evaluation.hpp"
#include "kge/fixture.hpp"
#include "kge/training.hpp"
#include "kge/util.hpp"
#include "support.hpp"

using namespace kge;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f s", s);
    return buf;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

struct Outcome {
    bool pass;
    std::string detail;
};

Outcome credibility_exactness() {
    const auto t0 = Clock::now();
    const double ff1 = ff_ratio(5606, 1437, 7), ff2 = ff_ratio(248, 120, 13);
    const double url = url_similarity(291, 85, 861).value, twt = tweet_similarity(5392, 10733).value;
    const double secs = seconds_since(t0);
    const bool ok = near(ff1, 595.571, 1e-3) && near(ff2, 9.846, 1e-3) && near(url, 0.218, 1e-3) &&
                    near(twt, 0.502, 1e-3) && secs < 1.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "FF_R %.3f / %.3f, URL_Sim %.4f, Twt_Sim %.4f, %.4f s", ff1, ff2, url, twt, secs);
    return {ok, buf};
}

Outcome metric_arithmetic() {
    auto m = classification_metrics({514, 104, 230, 152});
    const bool ok = near(m.accuracy, 0.744, 0.002) && near(m.precision, 0.832, 0.002) && near(m.recall, 0.772, 0.002) &&
                    near(m.f_score, 0.801, 0.002);
    char buf[160];
    std::snprintf(buf, sizeof buf, "accuracy %.4f precision %.4f recall %.4f F %.4f", m.accuracy, m.precision, m.recall,
                  m.f_score);
    return {ok, buf};
}

Outcome gradient_suite() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    for (auto kind : {ModelKind::transe, ModelKind::distmult, ModelKind::complex, ModelKind::hole, ModelKind::convkb}) {
        auto r = testing::check_gradients(kind, 100, 2024);
        ok = ok && r.instances == 100 && r.worst < 1e-4;
        char buf[80];
        std::snprintf(buf, sizeof buf, "%s %.1e, ", std::string(to_string(kind)).c_str(), r.worst);
        detail += buf;
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 30.0;
    return {ok, detail + seconds(secs)};
}

Outcome ranking_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(4);
    const ModelKind kinds[] = {ModelKind::transe, ModelKind::distmult, ModelKind::complex, ModelKind::hole,
                               ModelKind::convkb};
    std::size_t checked = 0, mismatches = 0, order_violations = 0;
    for (int g = 0; g < 50; ++g) {
        auto kg = split(testing::random_graph(rng, 30, 4, 200), {}, rng());
        auto params = init_params(kinds[g % 5], 4, rng(), kg.num_entities(), kg.num_relations());
        const auto& test = kg.triples();
        auto raw = evaluate_ranking(params, kg, test, RankMode::raw);
        auto filt = evaluate_ranking(params, kg, test, RankMode::filtered, 2);
        for (std::size_t i = 0; i < test.size(); ++i) {
            for (auto side : {Side::subject, Side::object}) {
                const auto r = side == Side::subject ? raw.ranks[i].subject : raw.ranks[i].object;
                const auto f = side == Side::subject ? filt.ranks[i].subject : filt.ranks[i].object;
                mismatches += r != testing::brute_force_rank(params, kg, test[i], side, false);
                mismatches += f != testing::brute_force_rank(params, kg, test[i], side, true);
                order_violations += f > r;
                checked += 2;
            }
        }
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && order_violations == 0 && secs < 30.0,
            std::to_string(checked) + " ranks, " + std::to_string(mismatches) + " mismatches, " +
                std::to_string(order_violations) + " filtered>raw, " + seconds(secs)};
}

// Fixture -> credibility filter -> graph, shared by the learnability and
// spam criteria.
struct Assembled {
    Fixture fixture;
    CredibilityReport report;
    KnowledgeGraph kg;
};

Assembled assemble() {
    Assembled a{make_fixture(0), {}, {}};
    a.report = credibility_rank(a.fixture.users, CredibilityConfig{});
    for (const auto& t : drop_flagged_facts(a.fixture.triples, a.report)) a.kg.add_triple(t);
    return a;
}

Outcome learnability(const KnowledgeGraph& assembled) {
    auto kg = split(assembled, {0.8, 0.1, 0.1}, 0);
    const auto test = kg.triples_in(Split::test);
    bool ok = true;
    std::string detail;
    for (auto kind : {ModelKind::transe, ModelKind::distmult, ModelKind::complex}) {
        TrainingConfig c;
        c.model = kind;
        c.seed = 0;
        c.k = 16;
        c.eta = 5;
        c.loss = LossKind::pairwise;
        c.optimizer = OptimizerKind::adagrad;
        c.lr = 0.1;
        c.epochs = 200;
        const auto t0 = Clock::now();
        auto r = train(kg.triples_in(Split::train), kg.num_entities(), kg.num_relations(), c);
        auto rep = evaluate_ranking(r.params, kg, test, RankMode::filtered);
        const double secs = seconds_since(t0);
        ok = ok && rep.metrics.hits3 >= 0.9 && secs < 60.0;
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s Hits@3 %.3f (%.1f s), ", std::string(to_string(kind)).c_str(),
                      rep.metrics.hits3, secs);
        detail += buf;
    }
    return {ok, detail + std::to_string(test.size()) + " test triples"};
}

Outcome model_algebra() {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g(0.0, 1.0);
    auto vec = [&](std::size_t n) {
        std::vector<double> v(n);
        for (auto& x : v) x = g(rng);
        return v;
    };
    double sym = 0, reduction = 0, anti = 0, fft = 0;
    for (int i = 0; i < 200; ++i) {
        auto h = vec(16), r = vec(16), t = vec(16);
        sym = std::max(sym, std::abs(distmult_score(h, r, t) - distmult_score(t, r, h)));

        auto hr = h, rr = r, tr = t;
        for (std::size_t j = 8; j < 16; ++j) hr[j] = rr[j] = tr[j] = 0;
        const std::vector<double> h8(h.begin(), h.begin() + 8), r8(r.begin(), r.begin() + 8), t8(t.begin(), t.begin() + 8);
        reduction = std::max(reduction, std::abs(complex_score(hr, rr, tr) - distmult_score(h8, r8, t8)));

        auto ri = r;
        for (std::size_t j = 0; j < 8; ++j) ri[j] = 0;
        anti = std::max(anti, std::abs(complex_score(h, ri, t) + complex_score(t, ri, h)));

        fft = std::max(fft, std::abs(hole_score_fft(h, r, t) - hole_score(h, r, t)));
    }
    const double worked = hole_score(std::vector<double>{1, 2, 3}, std::vector<double>{1, 0, 0},
                                     std::vector<double>{4, 5, 6});
    const bool ok = sym == 0.0 && reduction <= 1e-12 && anti <= 1e-12 && fft <= 1e-9 && worked == 32.0;
    char buf[200];
    std::snprintf(buf, sizeof buf, "symmetry %.1e, reduction %.1e, antisymmetry %.1e, FFT %.1e, HolE example %.0f", sym,
                  reduction, anti, fft, worked);
    return {ok, buf};
}

Outcome determinism(const KnowledgeGraph& assembled) {
    auto kg = split(assembled, {0.8, 0.1, 0.1}, 0);
    const auto test = kg.triples_in(Split::test);
    TrainingConfig c;
    c.model = ModelKind::complex;
    c.k = 8;
    c.epochs = 10;
    c.seed = 17;
    const auto root = testing::temp_dir("acceptance_determinism");
    std::string reports[2];
    for (int run = 0; run < 2; ++run) {
        auto r = train(kg.triples_in(Split::train), kg.num_entities(), kg.num_relations(), c);
        save_checkpoint(root / std::to_string(run), r.params, kg);
        auto rep = evaluate_ranking(r.params, kg, test, RankMode::filtered);
        reports[run] = rep.metrics_tsv() + rep.ranks_tsv(kg);
    }
    bool same_files = true;
    for (const char* f : {"manifest", "entities.vec", "relations.vec"})
        same_files = same_files && read_file(root / "0" / f) == read_file(root / "1" / f);

    auto trained = train(kg.triples_in(Split::train), kg.num_entities(), kg.num_relations(), c);
    auto loaded = load_checkpoint(root / "0");
    bool same_scores = loaded.params == trained.params;
    for (const auto& t : kg.triples()) same_scores = same_scores && score(loaded.params, t) == score(trained.params, t);

    const bool ok = same_files && reports[0] == reports[1] && same_scores;
    return {ok, std::string("checkpoint bytes ") + (same_files ? "identical" : "differ") + ", reports " +
                    (reports[0] == reports[1] ? "identical" : "differ") + ", reloaded scores " +
                    (same_scores ? "bit-exact" : "differ")};
}

Outcome clustering_projection() {
    std::vector<std::size_t> truth;
    Points blobs{2, testing::blob_points(60, 8, truth)};
    auto c = kmeans(blobs, 4, 8);
    std::map<std::size_t, std::size_t> mapping;
    bool exact = true;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        auto [it, fresh] = mapping.emplace(truth[i], c.labels[i]);
        exact = exact && it->second == c.labels[i];
    }
    std::set<std::size_t> used;
    for (auto& [t, f] : mapping) used.insert(f);
    exact = exact && used.size() == 4;

    bool monotone = true;
    for (std::size_t i = 1; i < c.inertia_trace.size(); ++i)
        monotone = monotone && c.inertia_trace[i] <= c.inertia_trace[i - 1] + 1e-9;

    std::mt19937_64 rng(9);
    std::normal_distribution<double> coef(0.0, 3.0), eps(0.0, 1e-3);
    Points plane{4, {}};
    for (int i = 0; i < 200; ++i) {
        const double a = coef(rng), b = coef(rng);
        const double row[4] = {a + 2 * b, -a, 3 * b, a - b};
        for (double x : row) plane.data.push_back(x + eps(rng));
    }
    auto p = pca_project(plane, 2);
    const double explained = p.explained_variance_ratio[0] + p.explained_variance_ratio[1];

    char buf[160];
    std::snprintf(buf, sizeof buf, "blobs %s, inertia %s over %zu steps, plane variance %.6f",
                  exact ? "recovered" : "mixed", monotone ? "non-increasing" : "increased", c.inertia_trace.size(),
                  explained);
    return {exact && monotone && explained >= 0.999, buf};
}

Outcome spam_filtering(const Assembled& a) {
    bool flagged = false, kept = false;
    for (const auto& u : a.report.users) {
        if (u.handle == a.fixture.spammer_handle) flagged = u.spam;
        if (u.handle == a.fixture.politics_user_handle) kept = !u.spam;
    }
    const bool absent = !a.kg.entities().find(a.fixture.spammer_handle).has_value();
    std::size_t politics_facts = 0;
    if (auto id = a.kg.entities().find(a.fixture.politics_user_handle))
        for (const auto& t : a.kg.triples()) politics_facts += t.subject == *id;
    const bool ok = flagged && absent && kept && politics_facts > 0;
    return {ok, a.fixture.spammer_handle + (flagged ? " flagged" : " not flagged") +
                    (absent ? ", facts absent" : ", facts present") + ", " + a.fixture.politics_user_handle +
                    (kept ? " retained with " : " dropped with ") + std::to_string(politics_facts) + " facts"};
}

Outcome calibration() {
    std::mt19937_64 rng(10);
    std::normal_distribution<double> pos(1.5, 0.4), neg(-1.5, 0.4);
    std::vector<double> scores;
    std::vector<char> labels;
    for (int i = 0; i < 500; ++i) {
        scores.push_back(pos(rng));
        labels.push_back(1);
        scores.push_back(neg(rng));
        labels.push_back(0);
    }
    auto cal = calibrate(scores, labels);
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool pred = cal.probability(scores[i]) >= 0.5;
        if (pred && labels[i]) ++cm.tp;
        else if (pred) ++cm.fp;
        else if (labels[i]) ++cm.fn;
        else ++cm.tn;
    }
    const double acc = classification_metrics(cm).accuracy;
    char buf[120];
    std::snprintf(buf, sizeof buf, "accuracy %.4f (a %.3f, b %.3f)", acc, cal.a, cal.b);
    return {acc >= 0.95, buf};
}

}  // namespace

int main() {
    const auto assembled = assemble();
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"credibility exactness", credibility_exactness},
        {"metric arithmetic", metric_arithmetic},
        {"gradient suite", gradient_suite},
        {"ranking oracle", ranking_oracle},
        {"learnability", [&] { return learnability(assembled.kg); }},
        {"model algebra", model_algebra},
        {"determinism", [&] { return determinism(assembled.kg); }},
        {"clustering and projection", clustering_projection},
        {"spam filtering", [&] { return spam_filtering(assembled); }},
        {"calibration", calibration},
    };
    int failed = 0, n = 0;
    for (const auto& [name, run] : criteria) {
        ++n;
        Outcome o{false, ""};
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%-4s criterion %2d %-26s %s\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", n - failed, n);
    return failed;
}
