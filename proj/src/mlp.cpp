#include "cgems/mlp.hpp"

#include <cmath>
#include <fstream>

#include "cgems/rng.hpp"

namespace cgems::learn {

using nlohmann::json;
using nlohmann::ordered_json;

nlohmann::ordered_json MlpConfig::to_json() const {
    return {{"hidden", hidden},           {"classes", classes}, {"learning_rate", learning_rate},
            {"epochs", epochs},           {"beta1", beta1},     {"beta2", beta2},
            {"epsilon", epsilon}};
}

MlpConfig MlpConfig::from_json(const nlohmann::json& j) {
    MlpConfig c;
    c.hidden = j.value("hidden", c.hidden);
    c.classes = j.value("classes", c.classes);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.epochs = j.value("epochs", c.epochs);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.validate();
    return c;
}

void MlpConfig::validate() const {
    const MlpConfig& c = *this;
    if (c.classes < 2 || c.epochs < 0 || !(c.learning_rate > 0))
        throw DomainError("invalid MLP configuration");
    for (int h : c.hidden)
        if (h < 1)
            throw DomainError("hidden layer sizes must be positive");
}

Matrix softmax(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double m = logits.row(i).maxCoeff();
        auto e = (logits.row(i).array() - m).exp();
        out.row(i) = e / e.sum();
    }
    return out;
}

MlpModel::MlpModel(int inputs, const MlpConfig& cfg, std::uint64_t seed_) : config(cfg), seed(seed_) {
    if (inputs < 1)
        throw DomainError("input width must be positive");
    cfg.validate();
    std::vector<int> sizes{inputs};
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(cfg.classes);
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const int fan_in = sizes[l], fan_out = sizes[l + 1];
        const bool output = l + 2 == sizes.size();
        const double limit = output ? std::sqrt(6.0 / (fan_in + fan_out)) : std::sqrt(6.0 / fan_in);
        Layer layer;
        layer.weights.resize(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r)
            for (int c = 0; c < fan_in; ++c)
                layer.weights(r, c) = rng.uniform(-limit, limit);
        layer.bias = Vector::Zero(fan_out);
        layers.push_back(std::move(layer));
    }
}

std::vector<int> MlpModel::layer_sizes() const {
    std::vector<int> s;
    if (layers.empty())
        return s;
    s.push_back(static_cast<int>(layers.front().weights.cols()));
    for (const auto& l : layers)
        s.push_back(static_cast<int>(l.weights.rows()));
    return s;
}

void MlpModel::check_width(Eigen::Index cols) const {
    if (cols != input_width())
        throw DomainError("input has " + std::to_string(cols) + " features, model expects " +
                          std::to_string(input_width()));
}

namespace {

struct Pass {
    std::vector<Matrix> pre;   // z per layer
    std::vector<Matrix> post;  // a per layer, post[0] = input
};

Pass run(const std::vector<Layer>& layers, const Matrix& x) {
    Pass p;
    p.post.push_back(x);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Matrix z = p.post.back() * layers[l].weights.transpose();
        z.rowwise() += layers[l].bias.transpose();
        p.pre.push_back(z);
        if (l + 1 < layers.size())
            p.post.push_back(z.cwiseMax(0.0));
        else
            p.post.push_back(softmax(z));
    }
    return p;
}

double cross_entropy(const Matrix& logits, const std::vector<int>& labels) {
    double total = 0;
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double m = logits.row(i).maxCoeff();
        const double lse = m + std::log((logits.row(i).array() - m).exp().sum());
        total += lse - logits(i, labels[static_cast<std::size_t>(i)]);
    }
    return total / static_cast<double>(logits.rows());
}

void check_labels(const Matrix& x, const std::vector<int>& labels, int classes) {
    if (labels.size() != static_cast<std::size_t>(x.rows()))
        throw DomainError("label count does not match row count");
    if (x.rows() == 0)
        throw DomainError("empty batch");
    for (int y : labels)
        if (y < 0 || y >= classes)
            throw DomainError("label out of range");
}

int argmax(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    Eigen::Index k = 0;
    row.maxCoeff(&k);
    return static_cast<int>(k);
}

}  // namespace

Matrix MlpModel::forward(const Matrix& x) const {
    check_width(x.cols());
    return run(layers, x).post.back();
}

Prediction MlpModel::predict(const Vector& x) const {
    Matrix row = x.transpose();
    Matrix p = forward(row);
    return {argmax(p.row(0)), p.row(0).transpose()};
}

std::vector<int> MlpModel::predict_labels(const Matrix& x) const {
    Matrix p = forward(x);
    std::vector<int> out;
    for (Eigen::Index i = 0; i < p.rows(); ++i)
        out.push_back(argmax(p.row(i)));
    return out;
}

Prediction MlpModel::predict_raw(const Vector& raw) const {
    check_width(raw.size());
    return predict(standardization ? standardization->apply(raw) : raw);
}

double MlpModel::loss(const Matrix& x, const std::vector<int>& labels) const {
    check_width(x.cols());
    check_labels(x, labels, config.classes);
    return cross_entropy(run(layers, x).pre.back(), labels);
}

std::vector<Layer> MlpModel::gradients(const Matrix& x, const std::vector<int>& labels) const {
    check_width(x.cols());
    check_labels(x, labels, config.classes);
    const Pass p = run(layers, x);
    const double n = static_cast<double>(x.rows());
    Matrix delta = p.post.back();
    for (Eigen::Index i = 0; i < delta.rows(); ++i)
        delta(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
    delta /= n;

    std::vector<Layer> grads(layers.size());
    for (std::size_t l = layers.size(); l-- > 0;) {
        grads[l].weights = delta.transpose() * p.post[l];
        grads[l].bias = delta.colwise().sum().transpose();
        if (l > 0) {
            Matrix back = delta * layers[l].weights;
            delta = back.cwiseProduct((p.pre[l - 1].array() > 0.0).cast<double>().matrix());
        }
    }
    return grads;
}

std::size_t MlpModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers)
        n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    return n;
}

std::vector<double> MlpModel::parameters() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (const auto& l : layers) {
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c)
                flat.push_back(l.weights(r, c));
        for (Eigen::Index r = 0; r < l.bias.size(); ++r)
            flat.push_back(l.bias(r));
    }
    return flat;
}

void MlpModel::set_parameters(const std::vector<double>& flat) {
    if (flat.size() != parameter_count())
        throw DomainError("parameter vector has wrong length");
    std::size_t k = 0;
    for (auto& l : layers) {
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c)
                l.weights(r, c) = flat[k++];
        for (Eigen::Index r = 0; r < l.bias.size(); ++r)
            l.bias(r) = flat[k++];
    }
}

TrainResult train_mlp(const Matrix& x, const std::vector<int>& labels, const MlpConfig& config, std::uint64_t seed) {
    if (!x.allFinite())
        throw DomainError("training matrix contains NaN or Inf");
    TrainResult res{MlpModel(static_cast<int>(x.cols()), config, seed), {}};
    MlpModel& model = res.model;
    check_labels(x, labels, config.classes);

    std::vector<Layer> m(model.layers.size()), v(model.layers.size());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        m[l].weights = v[l].weights = Matrix::Zero(model.layers[l].weights.rows(), model.layers[l].weights.cols());
        m[l].bias = v[l].bias = Vector::Zero(model.layers[l].bias.size());
    }
    double b1t = 1, b2t = 1;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const Pass p = run(model.layers, x);
        const double loss = cross_entropy(p.pre.back(), labels);
        if (!std::isfinite(loss))
            throw TrainingError("loss is not finite", epoch);
        int correct = 0;
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            correct += argmax(p.post.back().row(i)) == labels[static_cast<std::size_t>(i)];
        res.trace.loss.push_back(loss);
        res.trace.accuracy.push_back(static_cast<double>(correct) / static_cast<double>(x.rows()));

        const auto g = model.gradients(x, labels);
        b1t *= config.beta1;
        b2t *= config.beta2;
        const double c1 = 1 - b1t, c2 = 1 - b2t;
        auto step = [&](auto& param, auto& mm, auto& vv, const auto& grad) {
            mm = config.beta1 * mm + (1 - config.beta1) * grad;
            vv = config.beta2 * vv + (1 - config.beta2) * grad.cwiseAbs2();
            param.array() -= config.learning_rate * (mm.array() / c1) / ((vv.array() / c2).sqrt() + config.epsilon);
        };
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
            step(model.layers[l].weights, m[l].weights, v[l].weights, g[l].weights);
            step(model.layers[l].bias, m[l].bias, v[l].bias, g[l].bias);
        }
    }
    return res;
}

// ---- persistence ------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4)
        s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return s;
}

ordered_json MlpModel::to_json() const {
    ordered_json j;
    j["schema"] = kModelSchema;
    j["layer_sizes"] = layer_sizes();
    j["activations"] = {{"hidden", "relu"}, {"output", "softmax"}};
    j["config"] = config.to_json();
    j["seed"] = seed;
    j["features"] = features;
    ordered_json st = nullptr;
    if (standardization)
        st = {{"mean", standardization->mean},
              {"std", standardization->std},
              {"zero_variance", standardization->zero_variance}};
    j["standardization"] = st;
    ordered_json ls = ordered_json::array();
    for (const auto& l : layers) {
        std::vector<double> w;
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c)
                w.push_back(l.weights(r, c));
        ls.push_back({{"weights", w}, {"bias", std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())}});
    }
    j["layers"] = ls;
    j["pipeline"] = pipeline;
    ordered_json hashed = {{"config", j["config"]}, {"pipeline", pipeline}, {"seed", seed}, {"features", features}};
    j["config_hash"] = hex64(fnv1a64(nlohmann::json(hashed).dump()));
    return j;
}

MlpModel MlpModel::from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema").get<std::string>() != kModelSchema)
            throw DomainError("unsupported model schema '" + j.at("schema").get<std::string>() + "'");
        MlpModel m;
        m.config = MlpConfig::from_json(j.at("config"));
        m.seed = j.at("seed").get<std::uint64_t>();
        m.features = j.at("features").get<std::vector<std::string>>();
        const auto sizes = j.at("layer_sizes").get<std::vector<int>>();
        const auto& ls = j.at("layers");
        if (sizes.size() < 2 || ls.size() != sizes.size() - 1)
            throw DomainError("layer sizes do not match the stored layers");
        for (std::size_t l = 0; l < ls.size(); ++l) {
            const auto w = ls[l].at("weights").get<std::vector<double>>();
            const auto b = ls[l].at("bias").get<std::vector<double>>();
            const int in = sizes[l], out = sizes[l + 1];
            if (w.size() != static_cast<std::size_t>(in) * static_cast<std::size_t>(out) ||
                b.size() != static_cast<std::size_t>(out))
                throw DomainError("layer " + std::to_string(l) + " has inconsistent shape");
            Layer layer;
            layer.weights = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                w.data(), out, in);
            layer.bias = Eigen::Map<const Vector>(b.data(), out);
            m.layers.push_back(std::move(layer));
        }
        if (!m.features.empty() && m.features.size() != static_cast<std::size_t>(sizes.front()))
            throw DomainError("feature list does not match the input width");
        const auto& st = j.at("standardization");
        if (!st.is_null()) {
            Standardization s;
            s.columns = m.features;
            s.mean = st.at("mean").get<std::vector<double>>();
            s.std = st.at("std").get<std::vector<double>>();
            s.zero_variance = st.at("zero_variance").get<std::vector<bool>>();
            if (s.mean.size() != static_cast<std::size_t>(sizes.front()) || s.std.size() != s.mean.size() ||
                s.zero_variance.size() != s.mean.size())
                throw DomainError("standardization does not match the input width");
            m.standardization = std::move(s);
        }
        if (j.contains("pipeline"))
            m.pipeline = j.at("pipeline");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed model file: ") + e.what());
    }
}

void MlpModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    out << to_json().dump(2) << '\n';
}

MlpModel MlpModel::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DomainError("cannot read model " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw DomainError("model " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

}  // namespace cgems::learn
