#include "kge/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "kge/analytics.hpp"
#include "kge/checkpoint.hpp"
#include "kge/credibility.hpp"
#include "kge/error.hpp"
#include "kge/evaluation.hpp"
#include "kge/fixture.hpp"
#include "kge/ingest.hpp"
#include "kge/kg.hpp"
#include "kge/search.hpp"
#include "kge/training.hpp"
#include "kge/util.hpp"

namespace fs = std::filesystem;

namespace kge {

namespace {

struct Common {
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out;
    std::string config;
    bool verbose = false;
};

void add_common(CLI::App* cmd, Common& c, bool out_required = true) {
    cmd->add_option("--seed", c.seed, "Seed for every random choice");
    cmd->add_option("--threads", c.threads, "Worker threads for evaluation and clustering")->check(CLI::PositiveNumber);
    auto* out = cmd->add_option("--out", c.out, "Output path");
    if (out_required) out->required();
    cmd->add_flag("--verbose,-v", c.verbose, "Progress output");
}

KnowledgeGraph kg_from_triples(const std::vector<LabelTriple>& triples, std::size_t* duplicates = nullptr) {
    KnowledgeGraph kg;
    std::size_t dup = 0;
    for (const auto& t : triples) dup += kg.add_triple(t).duplicate;
    if (duplicates) *duplicates = dup;
    return kg;
}

std::vector<std::string> entity_labels(const KnowledgeGraph& kg, const std::vector<EntityId>& ids) {
    std::vector<std::string> out;
    for (auto id : ids) out.push_back(kg.entities().label(id));
    return out;
}

CredibilityConfig cred_config(const Common& c, const std::string& domains_path) {
    CredibilityConfig cfg;
    if (!c.config.empty()) cfg = load_credibility_config(read_file(c.config));
    if (!domains_path.empty()) cfg.domains = load_domains(domains_path);
    return cfg;
}

std::vector<UserRecord> load_users(const std::string& path, std::ostream& err) {
    auto set = parse_user_records(fs::path(path));
    for (const auto& e : set.errors)
        err << path << ":" << e.line << ": " << (e.field.empty() ? "" : e.field + ": ") << e.message << '\n';
    if (set.records.empty()) throw DataError(path + ": no valid user records");
    return std::move(set.records);
}

struct TrainFlags {
    std::string model;
    std::size_t k = 0, eta = 0, epochs = 0, batches = 0, num_filters = 0;
    std::string loss, optimizer, regularizer;
    double lr = 0;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
    cmd->add_option("--model", f.model, "transe, distmult, complex, hole or convkb");
    cmd->add_option("--k", f.k, "Embedding size")->check(CLI::PositiveNumber);
    cmd->add_option("--eta", f.eta, "Corruptions per positive")->check(CLI::PositiveNumber);
    cmd->add_option("--epochs", f.epochs, "Training epochs")->check(CLI::PositiveNumber);
    cmd->add_option("--batches", f.batches, "Batches per epoch")->check(CLI::PositiveNumber);
    cmd->add_option("--loss", f.loss, "pairwise, nll or absolute_margin");
    cmd->add_option("--optimizer", f.optimizer, "sgd, adagrad or adam");
    cmd->add_option("--regularizer", f.regularizer, "none or LP");
    cmd->add_option("--lr", f.lr, "Learning rate")->check(CLI::PositiveNumber);
    cmd->add_option("--num-filters", f.num_filters, "ConvKB filters")->check(CLI::PositiveNumber);
}

// Config file first, then every flag given on the command line.
TrainingConfig resolve_training(CLI::App* cmd, const TrainFlags& f, const Common& c) {
    TrainingConfig cfg;
    if (!c.config.empty()) cfg = TrainingConfig::from_json(read_file(c.config));
    if (cmd->count("--model")) cfg.model = parse_model_kind(f.model);
    if (cmd->count("--k")) cfg.k = f.k;
    if (cmd->count("--eta")) cfg.eta = f.eta;
    if (cmd->count("--epochs")) cfg.epochs = f.epochs;
    if (cmd->count("--batches")) cfg.batches_count = f.batches;
    if (cmd->count("--loss")) cfg.loss = parse_loss(f.loss);
    if (cmd->count("--optimizer")) cfg.optimizer = parse_optimizer(f.optimizer);
    if (cmd->count("--regularizer")) cfg.regularizer = parse_regularizer(f.regularizer);
    if (cmd->count("--lr")) cfg.lr = f.lr;
    if (cmd->count("--num-filters")) cfg.model_options.num_filters = f.num_filters;
    if (cmd->count("--seed")) cfg.seed = c.seed;
    if (c.verbose) cfg.verbose = true;
    cfg.validate();
    return cfg;
}

struct Loaded {
    KnowledgeGraph kg;
    Checkpoint checkpoint;
};

Loaded load_model(const std::string& kg_dir, const std::string& checkpoint_dir) {
    Loaded l{KnowledgeGraph::load(kg_dir), load_checkpoint(checkpoint_dir)};
    verify_dictionaries(l.checkpoint.manifest, l.kg);
    return l;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Knowledge graph embedding and credibility toolkit", "kge"};
    app.require_subcommand(1);

    Common c;
    TrainFlags tf;
    std::string triples_path, users_path, table_path, rules_path, kg_dir, checkpoint_dir, facts_path, space_path,
        prefix, domains_path, split_name = "test";
    std::vector<std::string> triple_files;
    double r_train = 0.8, r_valid = 0.1, r_test = 0.1;
    bool raw = false, filtered = false;
    std::size_t trials = 10, clusters = 4, dims = 2;

    auto* fixture = app.add_subcommand("fixture", "Write the synthetic politics dataset");
    add_common(fixture, c);

    auto* ingest = app.add_subcommand("ingest", "Build a knowledge graph from triple files");
    ingest->add_option("triples", triple_files, "TAB-separated triple files")->required()->check(CLI::ExistingFile);
    add_common(ingest, c);

    auto* map = app.add_subcommand("map", "Map a TSV table to triples");
    map->add_option("--table", table_path, "Table with a header row")->required()->check(CLI::ExistingFile);
    map->add_option("--rules", rules_path, "JSON mapping rules")->required()->check(CLI::ExistingFile);
    add_common(map, c);

    auto* cred_score = app.add_subcommand("cred-score", "Rank users by per-domain credibility");
    cred_score->add_option("--users", users_path, "User records (JSON lines)")->required()->check(CLI::ExistingFile);
    cred_score->add_option("--config", c.config, "Credibility config (JSON)")->check(CLI::ExistingFile);
    cred_score->add_option("--domains", domains_path, "Domain list, one per line")->check(CLI::ExistingFile);
    add_common(cred_score, c);

    auto* cred_filter = app.add_subcommand("cred-filter", "Drop facts contributed by flagged users");
    cred_filter->add_option("--users", users_path, "User records (JSON lines)")->required()->check(CLI::ExistingFile);
    cred_filter->add_option("--triples", triples_path, "Triples to filter")->required()->check(CLI::ExistingFile);
    cred_filter->add_option("--config", c.config, "Credibility config (JSON)")->check(CLI::ExistingFile);
    cred_filter->add_option("--domains", domains_path, "Domain list, one per line")->check(CLI::ExistingFile);
    add_common(cred_filter, c);

    auto* split_cmd = app.add_subcommand("split", "Assign train/valid/test splits");
    split_cmd->add_option("--kg", kg_dir, "Graph directory")->required()->check(CLI::ExistingDirectory);
    split_cmd->add_option("--train", r_train, "Train ratio");
    split_cmd->add_option("--valid", r_valid, "Validation ratio");
    split_cmd->add_option("--test", r_test, "Test ratio");
    add_common(split_cmd, c);

    auto* train_cmd = app.add_subcommand("train", "Train an embedding model");
    train_cmd->add_option("--kg", kg_dir, "Split graph directory")->required()->check(CLI::ExistingDirectory);
    train_cmd->add_option("--config", c.config, "Training config (JSON)")->check(CLI::ExistingFile);
    add_train_flags(train_cmd, tf);
    add_common(train_cmd, c);

    auto* tune = app.add_subcommand("tune", "Random search over a hyperparameter space");
    tune->add_option("--kg", kg_dir, "Split graph directory")->required()->check(CLI::ExistingDirectory);
    tune->add_option("--model", tf.model, "Model whose default space is searched");
    tune->add_option("--space", space_path, "Search space (JSON)")->check(CLI::ExistingFile);
    tune->add_option("--trials", trials, "Number of sampled configurations")->check(CLI::PositiveNumber);
    add_common(tune, c);

    auto* eval = app.add_subcommand("eval", "Link-prediction ranking evaluation");
    eval->add_option("--kg", kg_dir, "Split graph directory")->required()->check(CLI::ExistingDirectory);
    eval->add_option("--checkpoint", checkpoint_dir, "Checkpoint directory")->required()->check(CLI::ExistingDirectory);
    eval->add_option("--split", split_name, "Split to rank (valid or test)");
    auto* f_opt = eval->add_flag("--filtered", filtered, "Filtered protocol (default)");
    eval->add_flag("--raw", raw, "Raw protocol")->excludes(f_opt);
    add_common(eval, c);

    auto* classify_cmd = app.add_subcommand("classify", "Calibrated triple classification");
    classify_cmd->add_option("--kg", kg_dir, "Split graph directory")->required()->check(CLI::ExistingDirectory);
    classify_cmd->add_option("--checkpoint", checkpoint_dir, "Checkpoint directory")
        ->required()
        ->check(CLI::ExistingDirectory);
    classify_cmd->add_option("--facts", facts_path, "Labelled facts")->required()->check(CLI::ExistingFile);
    add_common(classify_cmd, c);

    auto* cluster = app.add_subcommand("cluster", "k-means over entity embeddings");
    auto* project = app.add_subcommand("project", "PCA projection of entity embeddings");
    auto* exporter = app.add_subcommand("export-projector", "Write embedding-projector files");
    for (auto* cmd : {cluster, project, exporter}) {
        cmd->add_option("--kg", kg_dir, "Graph directory")->required()->check(CLI::ExistingDirectory);
        cmd->add_option("--checkpoint", checkpoint_dir, "Checkpoint directory")
            ->required()
            ->check(CLI::ExistingDirectory);
        cmd->add_option("--prefix", prefix, "Only entities whose label starts with this");
        add_common(cmd, c);
    }
    cluster->add_option("--clusters", clusters, "Number of clusters")->check(CLI::PositiveNumber);
    project->add_option("--dims", dims, "2 or 3")->check(CLI::IsMember({2, 3}));

    std::vector<std::string> argv_store{"kge"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return 1;
    }

    auto log = [&](const std::string& msg) {
        if (c.verbose) err << msg << '\n';
    };

    try {
        const fs::path out_path = c.out;
        if (*fixture) {
            auto fx = generate_fixture(c.seed, out_path);
            log("wrote " + std::to_string(fx.triples.size()) + " triples, " + std::to_string(fx.users.size()) +
                " user records");
        } else if (*ingest) {
            std::vector<LabelTriple> all;
            for (const auto& f : triple_files) {
                auto part = parse_triples_tsv(fs::path(f));
                all.insert(all.end(), part.begin(), part.end());
            }
            std::size_t dup = 0;
            auto kg = kg_from_triples(all, &dup);
            kg.save(out_path);
            out << kg.size() << " triples, " << kg.num_entities() << " entities, " << kg.num_relations()
                << " relations, " << dup << " duplicates skipped\n";
        } else if (*map) {
            auto table = parse_table_tsv(read_file(table_path));
            auto rules = parse_mapping_rules(read_file(rules_path));
            auto triples = map_tabular(table, rules);
            write_file(out_path, format_triples_tsv(triples));
            log("mapped " + std::to_string(table.rows.size()) + " rows to " + std::to_string(triples.size()) +
                " triples");
        } else if (*cred_score) {
            auto report = credibility_rank(load_users(users_path, err), cred_config(c, domains_path));
            write_file(out_path, report.to_tsv());
            for (const auto& u : report.users)
                if (u.spam) out << "flagged\t" << u.handle << '\t' << u.reason << '\n';
        } else if (*cred_filter) {
            auto report = credibility_rank(load_users(users_path, err), cred_config(c, domains_path));
            auto triples = parse_triples_tsv(fs::path(triples_path));
            auto kept = drop_flagged_facts(triples, report);
            write_file(out_path, format_triples_tsv(kept));
            for (const auto& u : report.users)
                if (u.spam) out << "flagged\t" << u.handle << '\t' << u.reason << '\n';
            out << "kept " << kept.size() << " of " << triples.size() << " triples\n";
        } else if (*split_cmd) {
            auto kg = split(KnowledgeGraph::load(kg_dir), {r_train, r_valid, r_test}, c.seed);
            kg.save(out_path);
            out << "train " << kg.count(Split::train) << ", valid " << kg.count(Split::valid) << ", test "
                << kg.count(Split::test) << '\n';
        } else if (*train_cmd) {
            if (train_cmd->count("--model") == 0) {
                err << "error: --model is required\n\n" << train_cmd->help();
                return 1;
            }
            auto config = resolve_training(train_cmd, tf, c);
            auto kg = KnowledgeGraph::load(kg_dir);
            auto result = train(kg.triples_in(Split::train), kg.num_entities(), kg.num_relations(), config);
            save_checkpoint(out_path, result.params, kg);
            std::string loss = "epoch\tloss\n";
            for (std::size_t e = 0; e < result.epoch_loss.size(); ++e)
                loss += std::to_string(e + 1) + '\t' + format_double(result.epoch_loss[e]) + '\n';
            write_file(out_path / "loss.tsv", loss);
            write_file(out_path / "config.json", config.to_json() + '\n');
            if (config.verbose)
                for (std::size_t e = 0; e < result.epoch_loss.size(); ++e)
                    err << "epoch " << e + 1 << " loss " << format_double(result.epoch_loss[e]) << '\n';
        } else if (*tune) {
            SearchSpace space;
            if (!space_path.empty()) {
                space = load_search_space(read_file(space_path));
                if (tune->count("--model")) space.model = parse_model_kind(tf.model);
            } else {
                space = default_search_space(tune->count("--model") ? parse_model_kind(tf.model) : ModelKind::transe);
            }
            auto kg = KnowledgeGraph::load(kg_dir);
            auto result = random_search(space, trials, kg, c.seed, c.threads);
            fs::create_directories(out_path);
            write_file(out_path / "trials.tsv", result.log_tsv());
            write_file(out_path / "best_config.json", result.best.to_json() + '\n');
            out << "best trial " << result.best_trial << " valid MRR "
                << format_double(result.trials[result.best_trial].valid_mrr) << '\n';
        } else if (*eval) {
            auto [kg, ck] = load_model(kg_dir, checkpoint_dir);
            const auto which = parse_split(split_name);
            if (which == Split::train) throw std::invalid_argument("--split must be valid or test");
            auto report = evaluate_ranking(ck.params, kg, kg.triples_in(which), raw ? RankMode::raw : RankMode::filtered,
                                           c.threads);
            fs::create_directories(out_path);
            write_file(out_path / "metrics.tsv", report.metrics_tsv());
            write_file(out_path / "ranks.tsv", report.ranks_tsv(kg));
            out << report.summary() << '\n';
        } else if (*classify_cmd) {
            auto [kg, ck] = load_model(kg_dir, checkpoint_dir);
            auto facts = parse_labelled_facts(read_file(facts_path), kg);
            auto cal_set = synthesize_calibration_set(kg, kg.triples_in(Split::valid), c.seed);
            std::vector<double> scores;
            std::vector<char> labels;
            for (const auto& f : cal_set) {
                scores.push_back(score(ck.params, f.triple));
                labels.push_back(f.label ? 1 : 0);
            }
            auto cal = calibrate(scores, labels);
            auto result = classify(ck.params, cal, facts);
            std::string tsv = "subject\tpredicate\tobject\tlabel\tprobability\n";
            for (std::size_t i = 0; i < facts.size(); ++i) {
                const auto& t = facts[i].triple;
                tsv += kg.entities().label(t.subject) + '\t' + kg.relations().label(t.predicate) + '\t' +
                       kg.entities().label(t.object) + '\t' + (facts[i].label ? "true" : "false") + '\t' +
                       format_double(result.probabilities[i]) + '\n';
            }
            fs::create_directories(out_path);
            write_file(out_path / "predictions.tsv", tsv);
            const auto& m = result.metrics;
            std::string metrics = "metric\tvalue\n";
            metrics += "accuracy\t" + format_double(m.accuracy) + '\n';
            metrics += "precision\t" + format_double(m.precision) + '\n';
            metrics += "recall\t" + format_double(m.recall) + '\n';
            metrics += "f_score\t" + format_double(m.f_score) + '\n';
            metrics += "calibration_a\t" + format_double(cal.a) + "\ncalibration_b\t" + format_double(cal.b) + '\n';
            write_file(out_path / "metrics.tsv", metrics);
            out << "accuracy " << format_double(m.accuracy) << " precision " << format_double(m.precision)
                << " recall " << format_double(m.recall) << " F " << format_double(m.f_score) << '\n';
        } else {
            auto [kg, ck] = load_model(kg_dir, checkpoint_dir);
            auto ids = select_entities(kg.entities(), prefix);
            if (ids.empty()) throw DataError("no entity matches prefix '" + prefix + "'");
            auto points = gather_entity_rows(ck.params, ids);
            auto labels = entity_labels(kg, ids);
            if (*cluster) {
                auto result = kmeans(points, clusters, c.seed, 300, c.threads);
                write_file(out_path, format_clusters_tsv(labels, result));
                out << result.num_clusters << " clusters, inertia " << format_double(result.inertia) << ", "
                    << result.iterations << " iterations\n";
            } else if (*project) {
                auto result = pca_project(points, dims);
                write_file(out_path, format_projection_tsv(labels, result));
                out << "explained variance";
                for (double r : result.explained_variance_ratio) out << ' ' << format_double(r);
                out << '\n';
            } else {
                export_projector(points, labels, out_path);
            }
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const TrainingError& e) {
        err << "error: training failed: " << e.what() << '\n';
        return 2;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace kge
