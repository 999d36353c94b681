#include "cgems/dataset.hpp"

#include <atomic>
#include <charconv>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace cgems::data {

namespace fs = std::filesystem;

const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names{
        "Code Coverage",     "Maintainability Index", "Compiling",         "Functionality",
        "Edits",             "Sequence Ratio",        "CC Number",         "LOC",
        "ROUGE-1 Precision", "ROUGE-1 Recall",        "ROUGE-1 F1",        "ROUGE-2 Precision",
        "ROUGE-2 Recall",    "ROUGE-2 F1",            "ROUGE-L Precision", "ROUGE-L Recall",
        "ROUGE-L F1",        "LLOC",                  "SLOC",              "Comments",
        "C%L",               "C%S",                   "C+M%L",             "Difficulty",
        "Effort",            "Bugs",                  "Execution Time",    "Cosine Similarity",
        "Soft Cosine Similarity", "BLEU"};
    return names;
}

std::string_view feature_name(Feature f) { return feature_names()[static_cast<std::size_t>(f)]; }

const std::vector<std::string>& metadata_columns() {
    static const std::vector<std::string> cols{"CC Grade",        "Programming Time", "Compilation Errors",
                                               "CC Module Level", "Canned Stdin",     "Incomplete",
                                               "Label"};
    return cols;
}

std::vector<std::string> csv_header() {
    std::vector<std::string> h{"Program"};
    h.insert(h.end(), feature_names().begin(), feature_names().end());
    h.insert(h.end(), metadata_columns().begin(), metadata_columns().end());
    return h;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DomainError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- manifest -------------------------------------------------------------

std::vector<CorpusEntry> parse_manifest(std::string_view json_text, const fs::path& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("manifest is not valid JSON: ") + e.what(), 0, 0);
    }
    if (!j.is_array())
        throw ParseError("manifest must be a JSON array of entries", 0, 0);
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base_dir / p; };
    std::vector<CorpusEntry> out;
    int row = 0;
    for (const auto& e : j) {
        ++row;
        CorpusEntry c;
        try {
            c.id = e.at("id").get<std::string>();
            c.generated_path = resolve(e.at("generated").get<std::string>());
            if (e.contains("reference"))
                c.reference_path = resolve(e.at("reference").get<std::string>());
            if (e.contains("corrected"))
                c.corrected_path = resolve(e.at("corrected").get<std::string>());
            c.functionality = e.at("functionality").get<int>();
            if (e.contains("comments_valid"))
                c.comments_valid = e.at("comments_valid").get<bool>();
            if (e.contains("corrected_functionality"))
                c.corrected_functionality = e.at("corrected_functionality").get<int>();
            if (e.contains("corrected_comments_valid"))
                c.corrected_comments_valid = e.at("corrected_comments_valid").get<bool>();
            if (e.contains("stdin"))
                c.stdin_path = resolve(e.at("stdin").get<std::string>());
            c.nl_description = e.value("nl_description", "");
        } catch (const nlohmann::json::exception& ex) {
            throw ParseError(std::string("bad manifest entry: ") + ex.what(), row, 0);
        }
        if (c.functionality < 0 || c.functionality > 2)
            throw ParseError("functionality must be 0, 1 or 2", row, 0);
        if (c.corrected_functionality && (*c.corrected_functionality < 0 || *c.corrected_functionality > 2))
            throw ParseError("corrected_functionality must be 0, 1 or 2", row, 0);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<CorpusEntry> load_manifest(const fs::path& path) {
    return parse_manifest(read_text_file(path), fs::absolute(path).parent_path());
}

// ---- labeling -------------------------------------------------------------

int assign_label(const LabelInputs& in) {
    auto acceptable = [](const VersionStatus& v) { return v.compiling && v.functionality >= 1 && v.comments_valid; };
    if (acceptable(in.generated))
        return 1;
    return in.edits <= 3 && in.corrected && acceptable(*in.corrected) ? 1 : 0;
}

// ---- collection -----------------------------------------------------------

FeatureRecord collect_entry(const CorpusEntry& entry, const CollectOptions& options) {
    using F = Feature;
    FeatureRecord r;
    r.program = entry.id;

    const std::string generated = read_text_file(entry.generated_path);
    const auto rep = metrics::analyze_source(generated, options.profile);
    r[F::maintainability_index] = rep.mi;
    r[F::cc_number] = rep.cyclomatic.aggregate;
    r.cc_grade = rep.cyclomatic.grade;
    r.cc_module_level = rep.cyclomatic.module_level;
    r[F::loc] = rep.raw.loc;
    r[F::lloc] = rep.raw.lloc;
    r[F::sloc] = rep.raw.sloc;
    r[F::comments] = rep.raw.comments;
    r[F::c_pct_l] = rep.raw.c_pct_l;
    r[F::c_pct_s] = rep.raw.c_pct_s;
    r[F::cm_pct_l] = rep.raw.cm_pct_l;
    r[F::difficulty] = rep.halstead.difficulty;
    r[F::effort] = rep.halstead.effort;
    r[F::bugs] = rep.halstead.bugs;
    r.programming_time = rep.halstead.time;
    r[F::functionality] = entry.functionality;

    std::optional<std::string> corrected;
    if (entry.corrected_path)
        corrected = read_text_file(*entry.corrected_path);

    if (entry.reference_path) {
        const std::string reference = read_text_file(*entry.reference_path);
        auto s = sim::compare(generated, reference, nullptr);
        r[F::bleu] = s.bleu;
        r[F::rouge1_precision] = s.rouge1.precision;
        r[F::rouge1_recall] = s.rouge1.recall;
        r[F::rouge1_f1] = s.rouge1.f1;
        r[F::rouge2_precision] = s.rouge2.precision;
        r[F::rouge2_recall] = s.rouge2.recall;
        r[F::rouge2_f1] = s.rouge2.f1;
        r[F::rougeL_precision] = s.rougeL.precision;
        r[F::rougeL_recall] = s.rougeL.recall;
        r[F::rougeL_f1] = s.rougeL.f1;
        r[F::cosine] = s.cosine_deg;
        r[F::soft_cosine] = s.soft_cosine_deg;
    } else {
        for (F f : {F::bleu, F::rouge1_precision, F::rouge1_recall, F::rouge1_f1, F::rouge2_precision,
                    F::rouge2_recall, F::rouge2_f1, F::rougeL_precision, F::rougeL_recall, F::rougeL_f1,
                    F::cosine, F::soft_cosine})
            r.mark_incomplete(f);
    }

    if (corrected) {
        r[F::sequence_ratio] = sim::sequence_ratio(generated, *corrected);
        r[F::edits] = sim::edit_count(generated, *corrected);
    } else {
        r[F::sequence_ratio] = 1.0;
        r[F::edits] = 0;
    }

    std::optional<runner::RunnerConfig> cfg = options.runner;
    if (cfg && entry.stdin_path)
        cfg->stdin_file = *entry.stdin_path;
    r.canned_stdin = cfg && !cfg->stdin_file.empty();

    bool compiles = false;
    bool compile_known = false;
    if (cfg) {
        try {
            auto status = runner::check_compiles(entry.generated_path, *cfg);
            compiles = status.compiling == 1;
            r.compilation_errors = status.error_count;
            compile_known = true;
        } catch (const RunnerError&) {
        }
    }
    if (compile_known)
        r[F::compiling] = compiles ? 1 : 0;
    else
        r.mark_incomplete(F::compiling);

    if (compiles) {
        try {
            r[F::execution_time] = static_cast<double>(runner::measure_execution(entry.generated_path, *cfg));
        } catch (const Error&) {
            r.mark_incomplete(F::execution_time);
        }
        try {
            r[F::code_coverage] = runner::measure_coverage(entry.generated_path, *cfg);
        } catch (const Error&) {
            r.mark_incomplete(F::code_coverage);
        }
    } else {
        r.mark_incomplete(F::execution_time);
        r.mark_incomplete(F::code_coverage);
    }

    // The rules need the compile status; without a runner the record stays unlabelled.
    if (!compile_known)
        return r;
    LabelInputs li;
    li.generated = {compiles, entry.functionality,
                    entry.comments_valid.value_or(rep.raw.comments > 0)};
    li.edits = static_cast<int>(r[F::edits]);
    if (corrected) {
        VersionStatus cv;
        cv.functionality = entry.corrected_functionality.value_or(2);
        cv.comments_valid = entry.corrected_comments_valid.value_or(
            metrics::raw_metrics(source::tokenize(*corrected, options.profile), options.profile).comments > 0);
        cv.compiling = true;
        if (cfg) {
            try {
                cv.compiling = runner::check_compiles(*entry.corrected_path, *cfg).compiling == 1;
            } catch (const RunnerError&) {
            }
        }
        li.corrected = cv;
    }
    r.label = assign_label(li);
    return r;
}

CollectResult collect(const std::vector<CorpusEntry>& manifest, const CollectOptions& options) {
    std::vector<std::optional<FeatureRecord>> slots(manifest.size());
    std::vector<std::string> failures(manifest.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < manifest.size(); i = next++) {
            try {
                slots[i] = collect_entry(manifest[i], options);
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };
    unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(manifest.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < jobs; ++k)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    CollectResult out;
    for (std::size_t i = 0; i < manifest.size(); ++i) {
        if (slots[i])
            out.records.push_back(std::move(*slots[i]));
        else
            out.errors.push_back({manifest[i].id, failures[i]});
    }
    return out;
}

// ---- CSV ------------------------------------------------------------------

std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc())
        throw DomainError("cannot format number");
    return std::string(buf.data(), end);
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

// RFC 4180 record splitter; returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields, int row) {
    fields.clear();
    std::string field;
    bool in_quotes = false, any = false, quoted_field = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty() && !quoted_field) {
            in_quotes = quoted_field = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            quoted_field = false;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && in.peek() == '\n')
                in.get(c);
            fields.push_back(std::move(field));
            return true;
        } else {
            field += c;
        }
    }
    if (in_quotes)
        throw ParseError("unterminated quoted field", row, static_cast<int>(fields.size()) + 1);
    if (!any)
        return false;
    fields.push_back(std::move(field));
    return true;
}

double parse_number(const std::string& cell, int row, int col, const std::string& name) {
    double v = 0;
    auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || p != cell.data() + cell.size())
        throw ParseError("non-numeric value '" + cell + "' in column " + name, row, col);
    return v;
}

int parse_flag(const std::string& cell, int row, int col, const std::string& name) {
    if (cell == "0" || cell == "1")
        return cell[0] - '0';
    throw ParseError("expected 0 or 1 in column " + name, row, col);
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<FeatureRecord>& records) {
    auto header = csv_header();
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << quote(header[i]);
    out << '\n';
    for (const auto& r : records) {
        out << quote(r.program);
        for (double v : r.features)
            out << ',' << format_number(v);
        std::string incomplete;
        for (std::size_t i = 0; i < kFeatureCount; ++i)
            if (r.incomplete[i])
                incomplete += (incomplete.empty() ? "" : "|") + feature_names()[i];
        out << ',' << r.cc_grade << ',' << format_number(r.programming_time) << ',' << r.compilation_errors << ','
            << (r.cc_module_level ? 1 : 0) << ',' << (r.canned_stdin ? 1 : 0) << ',' << quote(incomplete) << ','
            << (r.label ? std::to_string(*r.label) : std::string()) << '\n';
    }
}

void write_csv(const fs::path& path, const std::vector<FeatureRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DomainError("cannot write " + path.string());
    write_csv(out, records);
}

std::vector<FeatureRecord> read_csv(std::istream& in) {
    std::vector<std::string> header;
    if (!read_record(in, header, 1))
        throw ParseError("empty CSV", 1, 0);
    const auto expected = csv_header();
    std::vector<int> pos(expected.size(), -1);
    for (std::size_t i = 0; i < header.size(); ++i) {
        auto it = std::find(expected.begin(), expected.end(), header[i]);
        if (it == expected.end())
            throw ParseError("unknown column '" + header[i] + "'", 1, static_cast<int>(i) + 1);
        pos[static_cast<std::size_t>(it - expected.begin())] = static_cast<int>(i);
    }
    for (std::size_t k = 0; k < expected.size(); ++k)
        if (pos[k] < 0)
            throw ParseError("missing column '" + expected[k] + "'", 1, 0);

    std::vector<FeatureRecord> out;
    std::vector<std::string> f;
    int row = 1;
    while (read_record(in, f, row + 1)) {
        ++row;
        if (f.size() == 1 && f[0].empty())
            continue;  // trailing blank line
        if (f.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(f.size()),
                             row, 0);
        auto cell = [&](std::size_t k) -> const std::string& { return f[static_cast<std::size_t>(pos[k])]; };
        auto col = [&](std::size_t k) { return pos[k] + 1; };
        FeatureRecord r;
        r.program = cell(0);
        for (std::size_t i = 0; i < kFeatureCount; ++i)
            r.features[i] = parse_number(cell(i + 1), row, col(i + 1), expected[i + 1]);
        std::size_t m = kFeatureCount + 1;
        const std::string& grade = cell(m);
        if (grade.size() != 1 || grade[0] < 'A' || grade[0] > 'F')
            throw ParseError("bad CC Grade '" + grade + "'", row, col(m));
        r.cc_grade = grade[0];
        r.programming_time = parse_number(cell(m + 1), row, col(m + 1), expected[m + 1]);
        r.compilation_errors = static_cast<int>(parse_number(cell(m + 2), row, col(m + 2), expected[m + 2]));
        r.cc_module_level = parse_flag(cell(m + 3), row, col(m + 3), expected[m + 3]) == 1;
        r.canned_stdin = parse_flag(cell(m + 4), row, col(m + 4), expected[m + 4]) == 1;
        const std::string& inc = cell(m + 5);
        std::size_t start = 0;
        while (start < inc.size()) {
            std::size_t bar = inc.find('|', start);
            std::string name = inc.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
            auto it = std::find(feature_names().begin(), feature_names().end(), name);
            if (it == feature_names().end())
                throw ParseError("unknown feature '" + name + "' in Incomplete", row, col(m + 5));
            r.incomplete[static_cast<std::size_t>(it - feature_names().begin())] = true;
            if (bar == std::string::npos)
                break;
            start = bar + 1;
        }
        if (!cell(m + 6).empty())
            r.label = parse_flag(cell(m + 6), row, col(m + 6), expected[m + 6]);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<FeatureRecord> read_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DomainError("cannot read " + path.string());
    return read_csv(in);
}

// ---- JSON reports ---------------------------------------------------------

nlohmann::ordered_json static_report_json(const metrics::StaticReport& rep) {
    nlohmann::ordered_json j;
    j["Maintainability Index"] = rep.mi;
    j["CC Grade"] = std::string(1, rep.cyclomatic.grade);
    j["CC Number"] = rep.cyclomatic.aggregate;
    j["LOC"] = rep.raw.loc;
    j["LLOC"] = rep.raw.lloc;
    j["SLOC"] = rep.raw.sloc;
    j["Comments"] = rep.raw.comments;
    j["C%L"] = rep.raw.c_pct_l;
    j["C%S"] = rep.raw.c_pct_s;
    j["C+M%L"] = rep.raw.cm_pct_l;
    j["Difficulty"] = rep.halstead.difficulty;
    j["Effort"] = rep.halstead.effort;
    j["Programming Time"] = rep.halstead.time;
    j["Bugs"] = rep.halstead.bugs;
    return j;
}

nlohmann::ordered_json similarity_report_json(const sim::SimilarityReport& s) {
    nlohmann::ordered_json j;
    if (s.has_edits)
        j["Edits"] = s.edits;
    j["Sequence Ratio"] = s.sequence_ratio;
    j["ROUGE-1 Precision"] = s.rouge1.precision;
    j["ROUGE-1 Recall"] = s.rouge1.recall;
    j["ROUGE-1 F1"] = s.rouge1.f1;
    j["ROUGE-2 Precision"] = s.rouge2.precision;
    j["ROUGE-2 Recall"] = s.rouge2.recall;
    j["ROUGE-2 F1"] = s.rouge2.f1;
    j["ROUGE-L Precision"] = s.rougeL.precision;
    j["ROUGE-L Recall"] = s.rougeL.recall;
    j["ROUGE-L F1"] = s.rougeL.f1;
    j["Cosine Similarity"] = s.cosine_deg;
    j["Soft Cosine Similarity"] = s.soft_cosine_deg;
    j["BLEU"] = s.bleu;
    return j;
}

}  // namespace cgems::data
