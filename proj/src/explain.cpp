#include "cgems/explain.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "cgems/rng.hpp"

namespace cgems::explain {

std::vector<FeatureWeight> Explanation::ranked() const {
    auto out = weights;
    std::stable_sort(out.begin(), out.end(),
                     [](const FeatureWeight& a, const FeatureWeight& b) { return std::abs(a.weight) > std::abs(b.weight); });
    return out;
}

double default_kernel_width(std::size_t d) { return 0.75 * std::sqrt(static_cast<double>(d)); }

WeightedFit weighted_least_squares(const Matrix& z, const Vector& y, const Vector& w) {
    const Eigen::Index n = z.rows(), d = z.cols();
    if (y.size() != n || w.size() != n || n == 0)
        throw DomainError("weighted least squares: inconsistent sizes");
    Matrix a(n, d + 1);
    a.col(0).setOnes();
    a.rightCols(d) = z;
    const Matrix aw = a.array().colwise() * w.array();
    Matrix normal = a.transpose() * aw;
    const Vector rhs = aw.transpose() * y;

    WeightedFit fit;
    Eigen::LDLT<Matrix> ldlt(normal);
    Vector beta;
    bool ok = ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.rcond() > 1e-12;
    if (ok) {
        beta = ldlt.solve(rhs);
        ok = beta.allFinite();
    }
    if (!ok) {
        normal.diagonal().array() += 1e-6;
        beta = Eigen::LDLT<Matrix>(normal).solve(rhs);
        fit.ridge = true;
    }
    fit.intercept = beta(0);
    fit.coefficients = beta.tail(d);

    const double wsum = w.sum();
    const double ybar = wsum > 0 ? w.dot(y) / wsum : 0.0;
    const Vector resid = y - a * beta;
    const double ss_res = (w.array() * resid.array().square()).sum();
    const double ss_tot = (w.array() * (y.array() - ybar).square()).sum();
    fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : (ss_res <= 1e-24 ? 1.0 : 0.0);
    return fit;
}

Explanation lime_explain(const BatchFunction& f, const Vector& x, const std::vector<std::string>& names,
                         const LimeOptions& options) {
    const auto d = static_cast<std::size_t>(x.size());
    if (d == 0 || names.size() != d)
        throw DomainError("explained row and feature names differ in width");
    if (options.n_samples == 0)
        throw DomainError("n_samples must be positive");
    const double width = options.kernel_width.value_or(default_kernel_width(d));
    if (!(width > 0))
        throw DomainError("kernel width must be positive");

    Rng rng(options.seed);
    const auto n = static_cast<Eigen::Index>(options.n_samples);
    Matrix offsets(n, x.size());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < x.size(); ++j)
            offsets(i, j) = rng.normal();
    const Matrix z = offsets.rowwise() + x.transpose();
    const Vector y = f(z);
    if (y.size() != n)
        throw DomainError("explained function returned the wrong number of outputs");
    const Vector w = (-offsets.rowwise().squaredNorm().array() / (width * width)).exp();

    const WeightedFit fit = weighted_least_squares(offsets, y, w);
    Explanation e;
    e.instance_id = options.instance_id;
    for (std::size_t j = 0; j < d; ++j)
        e.weights.push_back({names[j], fit.coefficients(static_cast<Eigen::Index>(j))});
    e.intercept = fit.intercept;
    e.r2 = fit.r2;
    e.probability = f(Matrix(x.transpose()))(0);
    e.n_samples = options.n_samples;
    e.kernel_width = width;
    e.seed = options.seed;
    e.ridge_fallback = fit.ridge;
    return e;
}

Explanation lime_explain(const learn::MlpModel& model, const Vector& x, const LimeOptions& options) {
    if (x.size() != model.input_width())
        throw DomainError("input has " + std::to_string(x.size()) + " features, model expects " +
                          std::to_string(model.input_width()));
    std::vector<std::string> names = model.features;
    if (names.empty())
        for (Eigen::Index j = 0; j < x.size(); ++j)
            names.push_back("x" + std::to_string(j));
    auto f = [&](const Matrix& rows) -> Vector { return model.forward(rows).col(1); };
    return lime_explain(f, x, names, options);
}

nlohmann::ordered_json to_json(const Explanation& e) {
    nlohmann::ordered_json j;
    j["schema"] = "cgems.explanation/1";
    j["instance_id"] = e.instance_id;
    j["probability"] = e.probability;
    j["intercept"] = e.intercept;
    j["r2"] = e.r2;
    j["n_samples"] = e.n_samples;
    j["kernel_width"] = e.kernel_width;
    j["seed"] = e.seed;
    j["ridge_fallback"] = e.ridge_fallback;
    auto ws = nlohmann::ordered_json::array();
    for (const auto& fw : e.ranked())
        ws.push_back({{"feature", fw.name}, {"weight", fw.weight}});
    j["weights"] = ws;
    return j;
}

namespace {

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_bar_chart_svg(std::ostream& out, const Explanation& e) {
    const auto rows = e.ranked();
    const int bar_h = 22, label_w = 220, plot_w = 360, top = 40;
    const int height = top + bar_h * static_cast<int>(rows.size()) + 20;
    const int width = label_w + plot_w + 90;
    double max_abs = 0;
    for (const auto& r : rows)
        max_abs = std::max(max_abs, std::abs(r.weight));
    if (max_abs == 0)
        max_abs = 1;
    const double axis = label_w + plot_w / 2.0;
    const double scale = (plot_w / 2.0 - 4) / max_abs;

    std::ostringstream num;
    num << std::setprecision(4);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "  <text x=\"10\" y=\"20\" font-size=\"14\">Local explanation";
    if (!e.instance_id.empty())
        out << " for " << escape_xml(e.instance_id);
    out << " (P(class 1) = " << std::fixed << std::setprecision(3) << e.probability << ")</text>\n";
    out << std::defaultfloat;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double y = top + bar_h * static_cast<double>(i);
        const double len = std::abs(rows[i].weight) * scale;
        const double x = rows[i].weight >= 0 ? axis : axis - len;
        const char* color = rows[i].weight >= 0 ? "#2e7d32" : "#c62828";
        out << "  <text x=\"" << label_w - 8 << "\" y=\"" << y + 15 << "\" text-anchor=\"end\">"
            << escape_xml(rows[i].name) << "</text>\n";
        out << "  <rect x=\"" << x << "\" y=\"" << y + 3 << "\" width=\"" << len << "\" height=\"" << bar_h - 6
            << "\" fill=\"" << color << "\"/>\n";
        num.str("");
        num << rows[i].weight;
        out << "  <text x=\"" << label_w + plot_w + 6 << "\" y=\"" << y + 15 << "\">" << num.str() << "</text>\n";
    }
    out << "  <line x1=\"" << axis << "\" y1=\"" << top << "\" x2=\"" << axis << "\" y2=\"" << height - 20
        << "\" stroke=\"#333\"/>\n";
    out << "</svg>\n";
}

}  // namespace cgems::explain
