// cgems: static, dynamic and similarity metrics for generated code, plus the
// selection / training / explanation pipeline on top of them.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "cgems/dataset.hpp"
#include "cgems/dynamic_runner.hpp"
#include "cgems/explain.hpp"
#include "cgems/pipeline.hpp"
#include "cgems/similarity.hpp"
#include "cgems/source_model.hpp"
#include "cgems/static_metrics.hpp"

#ifndef CGEMS_DEFAULT_RUNNER
#define CGEMS_DEFAULT_RUNNER "tools/runners/python_runner.json"
#endif

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace cgems;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Bad invocation or unreadable input.
class InputError : public Error {
public:
    using Error::Error;
};

struct Common {
    std::vector<std::string> argv;
    std::string config_path;
    nlohmann::json config = nlohmann::json::object();
    fs::path config_dir;
    unsigned jobs = 1;
    bool jobs_given = false;
};

void require_file(const fs::path& p, const std::string& what) {
    if (!fs::is_regular_file(p))
        throw InputError(what + " '" + p.string() + "' does not exist");
}

void load_config(Common& c) {
    if (c.config_path.empty())
        return;
    require_file(c.config_path, "config file");
    std::ifstream in(c.config_path);
    try {
        c.config = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!c.config.is_object())
        throw InputError("config file must hold a JSON object");
    c.config_dir = fs::path(c.config_path).parent_path();
    if (!c.jobs_given && c.config.contains("jobs"))
        c.jobs = c.config["jobs"].get<unsigned>();
}

fs::path config_path_value(const Common& c, const std::string& key) {
    if (!c.config.contains(key))
        return {};
    fs::path p = c.config[key].get<std::string>();
    return p.is_absolute() ? p : c.config_dir / p;
}

source::LanguageProfile resolve_profile(const Common& c, const std::string& flag) {
    fs::path p = !flag.empty() ? fs::path(flag) : config_path_value(c, "profile");
    if (p.empty())
        return source::default_profile();
    require_file(p, "profile");
    return source::load_profile(p);
}

// Flag, then CGEMS_RUNNER, then the config file, then the bundled Python runner.
fs::path resolve_runner_path(const Common& c, const std::string& flag) {
    if (!flag.empty())
        return flag;
    if (const char* env = std::getenv("CGEMS_RUNNER"); env && *env)
        return env;
    if (auto p = config_path_value(c, "runner"); !p.empty())
        return p;
    return CGEMS_DEFAULT_RUNNER;
}

std::string read_input(const fs::path& p, const std::string& what) {
    require_file(p, what);
    return data::read_text_file(p);
}

void write_text(const fs::path& p, const std::string& text) {
    if (p.has_parent_path())
        fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out || !(out << text))
        throw Error("cannot write " + p.string());
}

fs::path run_info_path(const fs::path& output) { return fs::path(output.string() + ".run.json"); }

// JSON commands: to stdout with the run info embedded, or to a file with the run info beside it.
void emit(ordered_json doc, const ordered_json& info, const std::string& output) {
    if (output.empty()) {
        doc["run_info"] = info;
        std::cout << doc.dump(2) << "\n";
        return;
    }
    write_text(output, doc.dump(2) + "\n");
    write_text(run_info_path(output), info.dump(2) + "\n");
}

ordered_json halstead_json(const metrics::HalsteadMetrics& h) {
    return {{"n1", h.n1},         {"n2", h.n2},         {"N1", h.N1},           {"N2", h.N2},
            {"vocabulary", h.vocabulary}, {"length", h.length}, {"volume", h.volume}, {"difficulty", h.difficulty},
            {"effort", h.effort}, {"time", h.time},     {"bugs", h.bugs}};
}

std::vector<data::FeatureRecord> load_records(const fs::path& csv) {
    require_file(csv, "CSV file");
    return data::read_csv(csv);
}

// ---- analyze --------------------------------------------------------------

struct AnalyzeArgs {
    std::string file, profile, output;
};

int cmd_analyze(const AnalyzeArgs& a, const Common& c) {
    const auto profile = resolve_profile(c, a.profile);
    const std::string text = read_input(a.file, "source file");
    const auto rep = metrics::analyze_source(text, profile);

    ordered_json doc;
    doc["schema"] = "cgems.analyze/1";
    doc["file"] = a.file;
    doc["metrics"] = data::static_report_json(rep);
    const auto& r = rep.raw;
    doc["raw"] = {{"loc", r.loc},           {"lloc", r.lloc},   {"sloc", r.sloc},
                  {"comments", r.comments}, {"multi", r.multi}, {"single_comments", r.single_comments},
                  {"blank", r.blank}};
    doc["halstead"] = halstead_json(rep.halstead);
    auto blocks = ordered_json::array();
    for (const auto& b : rep.cyclomatic.blocks)
        blocks.push_back({{"name", b.name}, {"role", source::to_string(b.role)}, {"line", b.start_line}, {"cc", b.cc}});
    doc["cyclomatic"] = {{"total", rep.cyclomatic.total},
                         {"aggregate", rep.cyclomatic.aggregate},
                         {"grade", std::string(1, rep.cyclomatic.grade)},
                         {"module_level", rep.cyclomatic.module_level},
                         {"blocks", blocks}};
    doc["mi"] = rep.mi;
    doc["lexical_error"] = rep.lexical_error.empty() ? ordered_json(nullptr) : ordered_json(rep.lexical_error);
    doc["structure_error"] = rep.structure_error.empty() ? ordered_json(nullptr) : ordered_json(rep.structure_error);
    if (!rep.lexical_error.empty())
        std::cerr << "warning: " << a.file << ": " << rep.lexical_error << " (partial raw metrics)\n";

    ordered_json knobs = {{"profile", source::profile_to_json(profile)}};
    emit(doc, pipeline::run_info("analyze", 0, pipeline::json_hash(knobs), c.argv), a.output);
    return kExitOk;
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
    std::string generated, reference, corrected, output;
};

int cmd_compare(const CompareArgs& a, const Common& c) {
    const std::string gen = read_input(a.generated, "generated file");
    const std::string ref = read_input(a.reference, "reference file");
    std::optional<std::string> corr;
    if (!a.corrected.empty())
        corr = read_input(a.corrected, "corrected file");
    else
        std::cerr << "note: no corrected version given; Edits omitted and Sequence Ratio set to 1\n";
    const auto rep = sim::compare(gen, ref, corr ? &*corr : nullptr);

    ordered_json doc;
    doc["schema"] = "cgems.compare/1";
    doc["generated"] = a.generated;
    doc["reference"] = a.reference;
    doc["corrected"] = corr ? ordered_json(a.corrected) : ordered_json(nullptr);
    ordered_json features = data::similarity_report_json(rep);
    if (rep.has_edits)
        features["Edits"] = rep.edits;
    doc["features"] = features;
    emit(doc, pipeline::run_info("compare", 0, pipeline::json_hash(nlohmann::json::object()), c.argv), a.output);
    return kExitOk;
}

// ---- collect --------------------------------------------------------------

struct CollectArgs {
    std::string manifest, output, runner, profile;
    bool static_only = false;
    bool json = false;
};

int cmd_collect(const CollectArgs& a, const Common& c) {
    require_file(a.manifest, "manifest");
    const auto entries = data::load_manifest(a.manifest);
    data::CollectOptions opt;
    opt.profile = resolve_profile(c, a.profile);
    opt.jobs = std::max(1u, c.jobs);
    std::string runner_used = "none";
    if (!a.static_only) {
        const fs::path rp = resolve_runner_path(c, a.runner);
        require_file(rp, "runner config");
        opt.runner = runner::load_runner_config(rp);
        runner_used = rp.string();
    }
    const auto result = data::collect(entries, opt);
    data::write_csv(fs::path(a.output), result.records);

    std::size_t labelled = 0, incomplete = 0;
    for (const auto& r : result.records) {
        labelled += r.label.has_value();
        incomplete += std::any_of(r.incomplete.begin(), r.incomplete.end(), [](bool b) { return b; });
    }
    auto errors = ordered_json::array();
    for (const auto& e : result.errors) {
        std::cerr << "error: " << e.id << ": " << e.message << "\n";
        errors.push_back({{"id", e.id}, {"message", e.message}});
    }
    ordered_json knobs = {{"profile", source::profile_to_json(opt.profile)}, {"runner", runner_used}};
    auto info = pipeline::run_info("collect", 0, pipeline::json_hash(knobs), c.argv);
    info["entries"] = entries.size();
    info["records"] = result.records.size();
    info["labelled"] = labelled;
    info["records_with_incomplete_cells"] = incomplete;
    info["runner"] = runner_used;
    info["errors"] = errors;
    write_text(run_info_path(a.output), info.dump(2) + "\n");
    if (a.json)
        std::cout << info.dump(2) << "\n";
    else
        std::cout << "wrote " << result.records.size() << " of " << entries.size() << " records to " << a.output
                  << " (" << labelled << " labelled, " << result.errors.size() << " failed)\n";
    return result.errors.empty() ? kExitOk : kExitFailure;
}

// ---- select-features / train ------------------------------------------------

struct TrainArgs {
    std::string csv, output, report, features, hidden;
    std::vector<std::string> exclude;
    std::optional<double> threshold, learning_rate;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> train_n;
    std::optional<int> smote_k, epochs;
    bool smote_after_split = false;
    bool json = false;
};

std::optional<std::size_t> parse_features(const std::string& s) {
    if (s == "all")
        return std::nullopt;
    try {
        std::size_t used = 0;
        long v = std::stol(s, &used);
        if (used == s.size() && v > 0)
            return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw InputError("--features expects a positive integer or 'all', got '" + s + "'");
}

pipeline::TrainOptions train_options(const TrainArgs& a, const Common& c) {
    pipeline::TrainOptions o;
    if (c.config.contains("train"))
        o = pipeline::TrainOptions::from_json(c.config["train"], o);
    if (!c.config.contains("train") && c.config.contains("seed"))
        o.seed = c.config["seed"].get<std::uint64_t>();
    if (!a.features.empty())
        o.features = parse_features(a.features);
    if (!a.exclude.empty())
        o.exclude = a.exclude;
    if (a.threshold)
        o.threshold = *a.threshold;
    if (a.seed)
        o.seed = *a.seed;
    if (a.train_n)
        o.train_n = *a.train_n;
    if (a.smote_k)
        o.smote_neighbors = *a.smote_k;
    if (a.smote_after_split)
        o.smote_after_split = true;
    if (a.epochs)
        o.mlp.epochs = *a.epochs;
    if (a.learning_rate)
        o.mlp.learning_rate = *a.learning_rate;
    if (!a.hidden.empty()) {
        std::vector<int> sizes;
        std::stringstream ss(a.hidden);
        std::string part;
        while (std::getline(ss, part, ','))
            try {
                sizes.push_back(std::stoi(part));
            } catch (const std::exception&) {
                throw InputError("--hidden expects comma-separated layer sizes");
            }
        o.mlp.hidden = sizes;
    }
    o.mlp.validate();
    if (!(o.threshold >= 0))
        throw InputError("--threshold must be non-negative");
    return o;
}

int cmd_select(const TrainArgs& a, const Common& c) {
    const auto o = train_options(a, c);
    std::vector<data::FeatureRecord> labelled;
    for (auto& r : load_records(a.csv))
        if (r.label)
            labelled.push_back(r);
    if (labelled.size() < 2)
        throw InputError("feature selection needs at least two labelled records");
    const auto z = pipeline::without(learn::standardize(learn::from_records(labelled)), o.exclude);
    const auto sel = pipeline::select_features(z, o.features, o.threshold);
    ordered_json doc;
    doc["schema"] = "cgems.selection/1";
    doc["csv"] = a.csv;
    doc["records"] = labelled.size();
    doc["selection"] = pipeline::selection_json(sel);
    ordered_json knobs = {{"features", o.to_json()["features"]}, {"threshold", o.threshold}};
    emit(doc, pipeline::run_info("select-features", o.seed, pipeline::json_hash(knobs), c.argv), a.output);
    return kExitOk;
}

int cmd_train(const TrainArgs& a, const Common& c) {
    const auto o = train_options(a, c);
    const auto records = load_records(a.csv);
    const auto t = pipeline::train(records, o);
    t.model.save(a.output);
    const auto report = pipeline::train_report_json(t, o);
    const fs::path report_path = a.report.empty() ? fs::path(a.output + ".report.json") : fs::path(a.report);
    write_text(report_path, report.dump(2) + "\n");
    const std::string hash = t.model.to_json()["config_hash"];
    auto info = pipeline::run_info("train", o.seed, hash, c.argv);
    info["model"] = a.output;
    info["report"] = report_path.string();
    write_text(run_info_path(a.output), info.dump(2) + "\n");

    if (a.json) {
        std::cout << report.dump(2) << "\n";
    } else {
        const auto& e = t.test_eval;
        std::cout << "features: " << t.selection.selected.size() << " (";
        for (std::size_t i = 0; i < t.selection.selected.size(); ++i)
            std::cout << (i ? ", " : "") << t.selection.selected[i];
        std::cout << ")\n";
        std::cout << "rows: " << t.labelled << " labelled + " << t.synthetic << " synthetic, train "
                  << t.train_programs.size() << " / test " << t.test_programs.size() << "\n";
        std::cout << std::fixed << std::setprecision(2) << "train accuracy: " << 100 * t.train_eval.accuracy
                  << "%\ntest accuracy: " << 100 * e.accuracy << "% (" << e.tp + e.tn << "/" << e.actual.size()
                  << ", misclassified " << e.misclassified() << ")\n";
        std::cout << "model: " << a.output << " (hash " << hash << ")\n";
    }
    return kExitOk;
}

// ---- predict / explain ------------------------------------------------------

struct Subject {
    std::string program;
    learn::Vector raw;
    std::optional<int> actual;
};

struct SubjectArgs {
    std::string model, csv, program, row, output;
};

std::vector<Subject> subjects(const SubjectArgs& a, const learn::MlpModel& model) {
    std::vector<Subject> out;
    if (!a.row.empty()) {
        std::vector<double> values;
        std::stringstream ss(a.row);
        std::string part;
        while (std::getline(ss, part, ','))
            try {
                values.push_back(std::stod(part));
            } catch (const std::exception&) {
                throw InputError("--row expects comma-separated numbers");
            }
        if (values.size() != model.features.size())
            throw DomainError("--row has " + std::to_string(values.size()) + " values, model expects " +
                              std::to_string(model.features.size()));
        out.push_back({"row", Eigen::Map<learn::Vector>(values.data(), static_cast<Eigen::Index>(values.size())), {}});
        return out;
    }
    for (const auto& r : load_records(a.csv))
        if (a.program.empty() || r.program == a.program)
            out.push_back({r.program, pipeline::model_row(model, r), r.label});
    if (out.empty())
        throw InputError(a.program.empty() ? "CSV has no records" : "program '" + a.program + "' not in CSV");
    return out;
}

learn::MlpModel load_model(const std::string& path) {
    require_file(path, "model");
    auto m = learn::MlpModel::load(path);
    if (!m.standardization || m.features.size() != static_cast<std::size_t>(m.input_width()))
        throw DomainError("model '" + path + "' carries no feature names or standardization");
    return m;
}

int cmd_predict(const SubjectArgs& a, const Common& c) {
    const auto model = load_model(a.model);
    const auto subs = subjects(a, model);
    auto preds = ordered_json::array();
    std::vector<int> predicted, actual;
    for (const auto& s : subs) {
        const auto p = model.predict_raw(s.raw);
        ordered_json row = {{"program", s.program},
                            {"label", p.label},
                            {"probabilities", std::vector<double>(p.probabilities.data(),
                                                                  p.probabilities.data() + p.probabilities.size())}};
        row["actual"] = s.actual ? ordered_json(*s.actual) : ordered_json(nullptr);
        preds.push_back(row);
        if (s.actual) {
            predicted.push_back(p.label);
            actual.push_back(*s.actual);
        }
    }
    ordered_json doc;
    doc["schema"] = "cgems.predictions/1";
    doc["model"] = a.model;
    doc["features"] = model.features;
    doc["predictions"] = preds;
    doc["evaluation"] = !actual.empty() && actual.size() == subs.size()
                            ? pipeline::eval_json(learn::evaluate(predicted, actual))
                            : ordered_json(nullptr);
    const std::string hash = model.to_json()["config_hash"];
    emit(doc, pipeline::run_info("predict", model.seed, hash, c.argv), a.output);
    return kExitOk;
}

struct ExplainArgs {
    SubjectArgs subject;
    std::optional<std::size_t> samples;
    std::optional<double> kernel_width;
    std::optional<std::uint64_t> seed;
    std::string bar_chart;
};

int cmd_explain(const ExplainArgs& a, const Common& c) {
    const auto model = load_model(a.subject.model);
    const auto subs = subjects(a.subject, model);
    explain::LimeOptions base;
    if (c.config.contains("explain")) {
        const auto& e = c.config["explain"];
        base.n_samples = e.value("samples", base.n_samples);
        if (e.contains("kernel_width"))
            base.kernel_width = e["kernel_width"].get<double>();
        base.seed = e.value("seed", base.seed);
    }
    if (a.samples)
        base.n_samples = *a.samples;
    if (a.kernel_width)
        base.kernel_width = *a.kernel_width;
    if (a.seed)
        base.seed = *a.seed;

    std::vector<explain::Explanation> results(subs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < subs.size();) {
            try {
                auto opt = base;
                opt.instance_id = subs[i].program;
                results[i] = explain::lime_explain(model, model.standardization->apply(subs[i].raw), opt);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(c.jobs, static_cast<unsigned>(subs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);

    auto list = ordered_json::array();
    for (const auto& e : results)
        list.push_back(explain::to_json(e));
    ordered_json doc;
    doc["schema"] = "cgems.explanations/1";
    doc["model"] = a.subject.model;
    doc["weight_units"] = "per standard deviation of each feature";
    doc["explanations"] = list;

    if (!a.bar_chart.empty()) {
        const fs::path chart = a.bar_chart;
        for (const auto& e : results) {
            fs::path p = chart;
            if (results.size() > 1)
                p = chart.parent_path() / (chart.stem().string() + "-" + e.instance_id + chart.extension().string());
            std::ostringstream svg;
            explain::write_bar_chart_svg(svg, e);
            write_text(p, svg.str());
        }
    }
    ordered_json knobs = {{"model", model.to_json()["config_hash"]},
                          {"samples", base.n_samples},
                          {"kernel_width", base.kernel_width ? ordered_json(*base.kernel_width) : ordered_json("default")}};
    emit(doc, pipeline::run_info("explain", base.seed, pipeline::json_hash(knobs), c.argv), a.subject.output);
    return kExitOk;
}

void add_subject_options(CLI::App* cmd, SubjectArgs& s) {
    cmd->add_option("model", s.model, "Model file written by 'train'")->required();
    auto* csv = cmd->add_option("--csv", s.csv, "Feature CSV to read rows from");
    auto* row = cmd->add_option("--row", s.row, "Comma-separated raw values in model feature order");
    csv->excludes(row);
    cmd->add_option("--program", s.program, "Only this program from the CSV")->needs(csv);
    cmd->add_option("-o,--output", s.output, "Write JSON here instead of stdout");
}

void add_train_options(CLI::App* cmd, TrainArgs& t) {
    cmd->add_option("csv", t.csv, "Feature CSV written by 'collect'")->required();
    cmd->add_option("--features", t.features, "Number of features to keep, or 'all' to skip pruning (default 8)");
    cmd->add_option("--threshold", t.threshold, "Correlation pruning threshold on |r| (default 0.8)");
    cmd->add_option("--seed", t.seed, "Random seed (default 42)");
    cmd->add_option("--exclude", t.exclude, "Features to leave out, comma-separated")->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Metrics and classifier pipeline for generated code"};
    app.set_version_flag("--version", pipeline::version());
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    common.argv.assign(argv, argv + argc);
    app.add_option("--config", common.config_path, "JSON config; flags override it");
    app.add_option("-j,--jobs", common.jobs, "Worker threads for collect and batch explain")
        ->check(CLI::PositiveNumber)
        ->each([&](const std::string&) { common.jobs_given = true; });

    AnalyzeArgs analyze;
    auto* c_analyze = app.add_subcommand("analyze", "Static metrics of one source file");
    c_analyze->add_option("file", analyze.file)->required();
    c_analyze->add_option("--profile", analyze.profile, "Language profile JSON");
    c_analyze->add_option("-o,--output", analyze.output, "Write JSON here instead of stdout");

    CompareArgs compare;
    auto* c_compare = app.add_subcommand("compare", "Similarity of generated code to a reference");
    c_compare->add_option("generated", compare.generated)->required();
    c_compare->add_option("reference", compare.reference)->required();
    c_compare->add_option("--corrected", compare.corrected, "Hand-corrected version for Edits / Sequence Ratio");
    c_compare->add_option("-o,--output", compare.output, "Write JSON here instead of stdout");

    CollectArgs collect;
    auto* c_collect = app.add_subcommand("collect", "Build the feature CSV of a corpus manifest");
    c_collect->add_option("manifest", collect.manifest)->required();
    c_collect->add_option("-o,--output", collect.output, "CSV to write")->required();
    c_collect->add_option("--runner", collect.runner, "Runner config JSON (overrides CGEMS_RUNNER)");
    c_collect->add_option("--profile", collect.profile, "Language profile JSON");
    c_collect->add_flag("--static-only", collect.static_only, "Skip compilation, execution and coverage");
    c_collect->add_flag("--json", collect.json, "Print the run info as JSON");

    TrainArgs select;
    auto* c_select = app.add_subcommand("select-features", "Correlation pruning and ANOVA ranking");
    add_train_options(c_select, select);
    c_select->add_option("-o,--output", select.output, "Write JSON here instead of stdout");

    TrainArgs train;
    auto* c_train = app.add_subcommand("train", "Select features, balance, split, train and evaluate");
    add_train_options(c_train, train);
    c_train->add_option("-o,--output", train.output, "Model file to write")->required();
    c_train->add_option("--report", train.report, "Training report JSON (default <model>.report.json)");
    c_train->add_option("--train-n", train.train_n, "Training rows (default 71/84 of the rows)");
    c_train->add_option("--smote-k", train.smote_k, "SMOTE neighbours (default 5)");
    c_train->add_flag("--smote-after-split", train.smote_after_split, "Oversample the training split only");
    c_train->add_option("--epochs", train.epochs, "Training epochs (default 1000)");
    c_train->add_option("--learning-rate", train.learning_rate, "Adam learning rate (default 1e-3)");
    c_train->add_option("--hidden", train.hidden, "Hidden layer sizes, e.g. 14,12");
    c_train->add_flag("--json", train.json, "Print the training report as JSON");

    SubjectArgs predict;
    auto* c_predict = app.add_subcommand("predict", "Class and probabilities for rows");
    add_subject_options(c_predict, predict);

    ExplainArgs expl;
    auto* c_explain = app.add_subcommand("explain", "Local linear explanations of predictions");
    add_subject_options(c_explain, expl.subject);
    c_explain->add_option("--samples", expl.samples, "Perturbation samples (default 5000)");
    c_explain->add_option("--kernel-width", expl.kernel_width, "Proximity kernel width (default 0.75 sqrt(d))");
    c_explain->add_option("--seed", expl.seed, "Random seed (default 0)");
    c_explain->add_option("--bar-chart", expl.bar_chart, "SVG bar chart path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        load_config(common);
        if (*c_analyze)
            return cmd_analyze(analyze, common);
        if (*c_compare)
            return cmd_compare(compare, common);
        if (*c_collect)
            return cmd_collect(collect, common);
        if (*c_select)
            return cmd_select(select, common);
        if (*c_train)
            return cmd_train(train, common);
        if (*c_predict) {
            if (predict.csv.empty() && predict.row.empty())
                throw InputError("predict needs --csv or --row");
            return cmd_predict(predict, common);
        }
        if (expl.subject.csv.empty() && expl.subject.row.empty())
            throw InputError("explain needs --csv or --row");
        return cmd_explain(expl, common);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
