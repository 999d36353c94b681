#include "cgems/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>
#include <boost/version.hpp>

#ifndef CGEMS_VERSION
#define CGEMS_VERSION "0.0.0"
#endif

namespace cgems::pipeline {

using nlohmann::ordered_json;

std::string version() { return CGEMS_VERSION; }

std::size_t default_train_n(std::size_t n) {
    if (n < 2)
        return 0;
    auto t = static_cast<std::size_t>(std::llround(static_cast<double>(n) * 71.0 / 84.0));
    return std::clamp<std::size_t>(t, 1, n - 1);
}

ordered_json TrainOptions::to_json() const {
    ordered_json j;
    j["features"] = features ? ordered_json(*features) : ordered_json("all");
    j["exclude"] = exclude;
    j["threshold"] = threshold;
    j["smote_neighbors"] = smote_neighbors;
    j["smote_after_split"] = smote_after_split;
    j["train_n"] = train_n ? ordered_json(*train_n) : ordered_json(nullptr);
    j["mlp"] = mlp.to_json();
    j["seed"] = seed;
    return j;
}

TrainOptions TrainOptions::from_json(const nlohmann::json& j, TrainOptions o) {
    if (!j.is_object())
        throw DomainError("training config must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "features") {
                if (v.is_string() && v.get<std::string>() == "all")
                    o.features.reset();
                else
                    o.features = v.get<std::size_t>();
            } else if (key == "exclude") {
                o.exclude = v.get<std::vector<std::string>>();
            } else if (key == "threshold") {
                o.threshold = v.get<double>();
            } else if (key == "smote_neighbors") {
                o.smote_neighbors = v.get<int>();
            } else if (key == "smote_after_split") {
                o.smote_after_split = v.get<bool>();
            } else if (key == "train_n") {
                if (v.is_null())
                    o.train_n.reset();
                else
                    o.train_n = v.get<std::size_t>();
            } else if (key == "mlp") {
                nlohmann::json merged = o.mlp.to_json();
                merged.update(v);
                o.mlp = learn::MlpConfig::from_json(merged);
            } else if (key == "seed") {
                o.seed = v.get<std::uint64_t>();
            } else {
                throw DomainError("unknown training option '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("bad training option: ") + e.what());
    }
    return o;
}

learn::FeatureMatrix without(const learn::FeatureMatrix& m, const std::vector<std::string>& exclude) {
    for (const auto& name : exclude)
        if (std::find(m.columns.begin(), m.columns.end(), name) == m.columns.end())
            throw DomainError("cannot exclude unknown feature '" + name + "'");
    std::vector<std::string> keep;
    for (const auto& name : m.columns)
        if (std::find(exclude.begin(), exclude.end(), name) == exclude.end())
            keep.push_back(name);
    return m.select(keep);
}

Selection select_features(const learn::FeatureMatrix& z, std::optional<std::size_t> k, double threshold) {
    Selection s;
    if (k) {
        s.report = learn::correlation_prune(z, threshold);
    } else {
        // Keep everything; the report still carries the correlations for inspection.
        s.report = learn::correlation_prune(z, std::numeric_limits<double>::infinity());
        s.report.pruned.clear();
        s.report.kept = s.report.columns;
        s.pruned = false;
    }
    if (s.report.kept.empty())
        throw DomainError("no features survive pruning");
    s.report.scores = learn::anova_f(z.select(s.report.kept));
    if (k && *k == 0)
        throw DomainError("--features must be positive");
    const std::size_t take = k ? std::min(*k, s.report.kept.size()) : s.report.kept.size();
    s.report.selected = take == s.report.kept.size() ? s.report.kept : learn::select_k_best(s.report.scores, take);
    s.selected = s.report.selected;
    return s;
}

namespace {

std::vector<std::string> names_for(const std::vector<std::string>& programs, std::size_t rows) {
    std::vector<std::string> out = programs;
    for (std::size_t i = programs.size(); i < rows; ++i)
        out.push_back("smote-" + std::to_string(i - programs.size()));
    return out;
}

std::vector<std::string> pick(const std::vector<std::string>& names, const std::vector<std::size_t>& idx) {
    std::vector<std::string> out;
    for (auto i : idx)
        out.push_back(names[i]);
    return out;
}

}  // namespace

TrainOutcome train(const std::vector<data::FeatureRecord>& records, const TrainOptions& o) {
    TrainOutcome out;
    std::vector<data::FeatureRecord> labelled;
    std::vector<std::string> programs;
    for (const auto& r : records) {
        if (r.label) {
            labelled.push_back(r);
            programs.push_back(r.program);
        } else {
            ++out.unlabelled_skipped;
        }
    }
    out.labelled = labelled.size();
    if (labelled.size() < 4)
        throw DomainError("training needs at least 4 labelled records, got " + std::to_string(labelled.size()));

    const learn::FeatureMatrix raw = learn::from_records(labelled);
    raw.validate();
    const learn::FeatureMatrix z = learn::standardize(raw);
    out.selection = select_features(without(z, o.exclude), o.features, o.threshold);
    const learn::FeatureMatrix chosen = z.select(out.selection.selected);

    learn::FeatureMatrix train_m, test_m;
    if (!o.smote_after_split) {
        const learn::FeatureMatrix balanced = learn::smote(chosen, o.smote_neighbors, o.seed);
        out.synthetic = balanced.n() - chosen.n();
        const auto names = names_for(programs, balanced.n());
        const auto sp = learn::split(balanced, o.train_n.value_or(default_train_n(balanced.n())), o.seed);
        train_m = sp.train;
        test_m = sp.test;
        out.train_programs = pick(names, sp.train_indices);
        out.test_programs = pick(names, sp.test_indices);
    } else {
        const auto sp = learn::split(chosen, o.train_n.value_or(default_train_n(chosen.n())), o.seed);
        train_m = learn::smote(sp.train, o.smote_neighbors, o.seed);
        out.synthetic = train_m.n() - sp.train.n();
        test_m = sp.test;
        out.train_programs = names_for(pick(programs, sp.train_indices), train_m.n());
        out.test_programs = pick(programs, sp.test_indices);
    }

    auto result = learn::train_mlp(train_m.rows, train_m.labels, o.mlp, o.seed);
    out.model = std::move(result.model);
    out.trace = std::move(result.trace);
    out.model.features = out.selection.selected;
    out.model.standardization = z.standardization->subset(out.selection.selected);
    out.model.pipeline = o.to_json();
    out.train_eval = learn::evaluate(out.model.predict_labels(train_m.rows), train_m.labels);
    out.test_eval = learn::evaluate(out.model.predict_labels(test_m.rows), test_m.labels);
    return out;
}

learn::Vector model_row(const learn::MlpModel& model, const data::FeatureRecord& record) {
    const auto& names = data::feature_names();
    learn::Vector x(static_cast<Eigen::Index>(model.features.size()));
    for (std::size_t k = 0; k < model.features.size(); ++k) {
        auto it = std::find(names.begin(), names.end(), model.features[k]);
        if (it == names.end())
            throw DomainError("model feature '" + model.features[k] + "' is not a known feature");
        x(static_cast<Eigen::Index>(k)) = record.features[static_cast<std::size_t>(it - names.begin())];
    }
    return x;
}

ordered_json selection_json(const Selection& s) {
    ordered_json j;
    j["threshold"] = s.pruned ? ordered_json(s.report.threshold) : ordered_json(nullptr);
    j["considered"] = s.report.columns;
    j["kept"] = s.report.kept;
    auto pruned = ordered_json::array();
    for (const auto& p : s.report.pruned)
        pruned.push_back({{"feature", p.name}, {"reason", p.reason}});
    j["pruned"] = pruned;
    auto scores = ordered_json::array();
    for (const auto& f : s.report.scores)
        scores.push_back({{"feature", f.name}, {"f", f.f}, {"p", f.p}});
    j["anova"] = scores;
    j["selected"] = s.selected;
    auto corr = ordered_json::array();
    for (Eigen::Index a = 0; a < s.report.correlations.rows(); ++a) {
        auto row = ordered_json::array();
        for (Eigen::Index b = 0; b < s.report.correlations.cols(); ++b)
            row.push_back(s.report.correlations(a, b));
        corr.push_back(row);
    }
    j["correlations"] = corr;
    return j;
}

ordered_json eval_json(const learn::EvalReport& e) {
    ordered_json j;
    j["tp"] = e.tp;
    j["fp"] = e.fp;
    j["fn"] = e.fn;
    j["tn"] = e.tn;
    j["accuracy"] = e.accuracy;
    j["precision"] = e.precision;
    j["recall"] = e.recall;
    j["f1"] = e.f1;
    j["misclassified"] = e.misclassified();
    j["predicted"] = e.predicted;
    j["actual"] = e.actual;
    return j;
}

ordered_json train_report_json(const TrainOutcome& t, const TrainOptions& o) {
    ordered_json j;
    j["schema"] = "cgems.train-report/1";
    j["options"] = o.to_json();
    j["labelled"] = t.labelled;
    j["unlabelled_skipped"] = t.unlabelled_skipped;
    j["synthetic"] = t.synthetic;
    j["selection"] = selection_json(t.selection);
    j["layer_sizes"] = t.model.layer_sizes();
    j["final_loss"] = t.trace.loss.empty() ? ordered_json(nullptr) : ordered_json(t.trace.loss.back());
    j["train_programs"] = t.train_programs;
    j["test_programs"] = t.test_programs;
    j["train"] = eval_json(t.train_eval);
    j["test"] = eval_json(t.test_eval);
    j["model_hash"] = t.model.to_json()["config_hash"];
    return j;
}

std::string json_hash(const nlohmann::json& j) { return learn::hex64(learn::fnv1a64(j.dump())); }

ordered_json run_info(const std::string& command, std::uint64_t seed, const std::string& config_hash,
                      const std::vector<std::string>& argv) {
    ordered_json j;
    j["schema"] = "cgems.run/1";
    j["command"] = command;
    j["argv"] = argv;
    j["seed"] = seed;
    j["config_hash"] = config_hash;
    j["versions"] = {{"cgems", version()},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"boost", BOOST_LIB_VERSION},
                     {"compiler", __VERSION__}};
    return j;
}

}  // namespace cgems::pipeline
