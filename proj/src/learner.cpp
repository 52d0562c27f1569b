#include "mpcfl/learner.hpp"

#include <cmath>
#include <limits>

namespace mpcfl {

std::vector<std::pair<int, int>> ModelSpec::layer_shapes() const {
    std::vector<std::pair<int, int>> shapes;
    int prev = input_dim;
    for (int h : hidden_dims) {
        shapes.emplace_back(prev, h);
        prev = h;
    }
    shapes.emplace_back(prev, output_dim);
    return shapes;
}

Eigen::Index ModelSpec::param_count() const {
    Eigen::Index s = 0;
    for (auto [in, out] : layer_shapes()) s += static_cast<Eigen::Index>(in) * out;
    return s;
}

ModelTensor init_model(const ModelSpec& spec, RngStream& rng) {
    ModelTensor model;
    model.spec = spec;
    model.weights.resize(spec.param_count());
    Eigen::Index offset = 0;
    for (auto [in, out] : spec.layer_shapes()) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        const Eigen::Index count = static_cast<Eigen::Index>(in) * out;
        for (Eigen::Index i = 0; i < count; ++i) {
            model.weights[offset + i] = bound * (2.0 * rng.uniform01() - 1.0);
        }
        offset += count;
    }
    return model;
}

ModelTensor init_model(const ModelSpec& spec, std::uint64_t seed) {
    RngStream rng(seed, 0, rng_tag::kModelInit);
    return init_model(spec, rng);
}

namespace {

using ConstLayerMap = Eigen::Map<const Eigen::MatrixXd>;
using LayerMap = Eigen::Map<Eigen::MatrixXd>;

void check_width(const ModelTensor& model, Eigen::Index cols) {
    if (cols != model.spec.input_dim) {
        throw DimensionMismatch("expected " + std::to_string(model.spec.input_dim) +
                                " features, got " + std::to_string(cols));
    }
    if (model.weights.size() != model.spec.param_count()) {
        throw DimensionMismatch("weight vector length does not match the architecture");
    }
}

/// Activations per layer; hidden layers already rectified.
std::vector<Eigen::MatrixXd> forward_pass(const ModelTensor& model,
                                          const Eigen::MatrixXd& features) {
    const auto shapes = model.spec.layer_shapes();
    std::vector<Eigen::MatrixXd> acts;
    acts.reserve(shapes.size() + 1);
    acts.push_back(features);
    Eigen::Index offset = 0;
    for (std::size_t l = 0; l < shapes.size(); ++l) {
        const auto [in, out] = shapes[l];
        ConstLayerMap w(model.weights.data() + offset, in, out);
        Eigen::MatrixXd z = acts.back() * w;
        if (l + 1 < shapes.size()) z = z.cwiseMax(0.0);
        acts.push_back(std::move(z));
        offset += static_cast<Eigen::Index>(in) * out;
    }
    return acts;
}

}  // namespace

Eigen::MatrixXd forward_batch(const ModelTensor& model, const Eigen::MatrixXd& features) {
    check_width(model, features.cols());
    return forward_pass(model, features).back();
}

Eigen::Vector2d forward(const ModelTensor& model, const Eigen::RowVectorXd& row) {
    check_width(model, row.size());
    const Eigen::MatrixXd scores = forward_pass(model, row).back();
    return scores.row(0).transpose();
}

std::pair<double, Eigen::VectorXd> loss_and_grad(const ModelTensor& model,
                                                 const Dataset& data) {
    if (data.rows() == 0) throw EmptyDataset("loss_and_grad on empty dataset");
    if (data.labels.size() != data.rows()) {
        throw DimensionMismatch("label count does not match feature rows");
    }
    check_width(model, data.features.cols());

    const auto shapes = model.spec.layer_shapes();
    const auto acts = forward_pass(model, data.features);
    const Eigen::MatrixXd& scores = acts.back();
    const Eigen::Index rows = data.rows();

    // softmax cross-entropy, stabilized rowwise
    Eigen::MatrixXd shifted = scores.colwise() - scores.rowwise().maxCoeff();
    Eigen::MatrixXd exps = shifted.array().exp();
    Eigen::VectorXd denom = exps.rowwise().sum();
    Eigen::MatrixXd probs = exps.array().colwise() / denom.array();

    double loss = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        loss -= std::log(probs(r, data.labels[r]));
    }
    loss /= static_cast<double>(rows);

    Eigen::MatrixXd delta = probs;
    for (Eigen::Index r = 0; r < rows; ++r) delta(r, data.labels[r]) -= 1.0;
    delta /= static_cast<double>(rows);

    Eigen::VectorXd grad(model.weights.size());
    std::vector<Eigen::Index> offsets(shapes.size());
    Eigen::Index offset = 0;
    for (std::size_t l = 0; l < shapes.size(); ++l) {
        offsets[l] = offset;
        offset += static_cast<Eigen::Index>(shapes[l].first) * shapes[l].second;
    }
    for (std::size_t l = shapes.size(); l-- > 0;) {
        const auto [in, out] = shapes[l];
        LayerMap gw(grad.data() + offsets[l], in, out);
        gw = acts[l].transpose() * delta;
        if (l > 0) {
            ConstLayerMap w(model.weights.data() + offsets[l], in, out);
            // rectifier gate: acts[l] is already max(z, 0)
            delta = (delta * w.transpose())
                        .cwiseProduct((acts[l].array() > 0.0).cast<double>().matrix());
        }
    }
    return {loss, std::move(grad)};
}

ModelTensor local_train(ModelTensor model, const Dataset& data, int iters, double lr) {
    for (int k = 0; k < iters; ++k) {
        auto [loss, grad] = loss_and_grad(model, data);
        (void)loss;
        model.weights -= lr * grad;
        model.iteration += 1;
    }
    return model;
}

Metrics compute_metrics(const ModelTensor& model, const Dataset& data) {
    if (data.rows() == 0) throw EmptyDataset("compute_metrics on empty dataset");
    const Eigen::MatrixXd scores = forward_batch(model, data.features);
    Metrics m;
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
        const int pred = scores(r, 1) > scores(r, 0) ? 1 : 0;  // ties go to class 0
        const int truth = data.labels[r];
        if (truth == 1 && pred == 1) ++m.tp;
        if (truth == 1 && pred == 0) ++m.fn;
        if (truth == 0 && pred == 1) ++m.fp;
        if (truth == 0 && pred == 0) ++m.tn;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double tpr = (m.tp + m.fn) > 0
                           ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn)
                           : nan;
    const double tnr = (m.tn + m.fp) > 0
                           ? static_cast<double>(m.tn) / static_cast<double>(m.tn + m.fp)
                           : nan;
    m.recall = tpr;
    m.precision = (m.tp + m.fp) > 0
                      ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp)
                      : nan;
    m.balanced = (tpr + tnr) / 2.0;  // NaN when either class is absent
    return m;
}

SyntheticData gen_synthetic(const SyntheticConfig& cfg) {
    if (cfg.parties < 1) throw ConfigError("gen_synthetic: parties >= 1 required");
    if (cfg.rows_per_party < 2) throw ConfigError("gen_synthetic: rows >= 2 required");
    const int dim = 121;

    // Class separation direction, shared by all parties.
    RngStream base(cfg.seed, 0, rng_tag::kDataGen);
    Eigen::VectorXd direction(dim);
    for (int k = 0; k < dim; ++k) direction[k] = base.gaussian();
    direction.normalize();

    // Per-party mean shift: a component along the class direction (moves
    // the decision boundary between companies) plus an off-axis component.
    std::vector<Eigen::VectorXd> shifts(static_cast<std::size_t>(cfg.parties));
    for (int i = 0; i < cfg.parties; ++i) {
        Eigen::VectorXd off(dim);
        for (int k = 0; k < dim; ++k) off[k] = base.gaussian();
        off -= off.dot(direction) * direction;
        off.normalize();
        const double along = base.gaussian();
        shifts[static_cast<std::size_t>(i)] =
            cfg.shift * (0.6 * along * direction + off);
    }

    const auto draw_row = [&](RngStream& rng, const Eigen::VectorXd& shift, int label,
                              Eigen::MatrixXd& features, Eigen::Index r) {
        const double sign = label == 1 ? 1.0 : -1.0;
        for (int k = 0; k < dim; ++k) {
            features(r, k) = sign * 0.5 * cfg.separation * direction[k] + shift[k] +
                             rng.gaussian();
        }
    };

    SyntheticData out;
    out.party_data.resize(static_cast<std::size_t>(cfg.parties));
    for (int i = 0; i < cfg.parties; ++i) {
        RngStream rng(cfg.seed, static_cast<std::uint64_t>(i + 1), rng_tag::kDataGen);
        Dataset& d = out.party_data[static_cast<std::size_t>(i)];
        d.features.resize(cfg.rows_per_party, dim);
        d.labels.resize(cfg.rows_per_party);
        for (Eigen::Index r = 0; r < cfg.rows_per_party; ++r) {
            const int label = static_cast<int>(r % 2);  // balanced classes
            d.labels[r] = label;
            draw_row(rng, shifts[static_cast<std::size_t>(i)], label, d.features, r);
        }
    }

    RngStream held(cfg.seed, 0, rng_tag::kHeldOut);
    out.held_out.features.resize(cfg.held_out_rows, dim);
    out.held_out.labels.resize(cfg.held_out_rows);
    for (Eigen::Index r = 0; r < cfg.held_out_rows; ++r) {
        const int label = static_cast<int>(r % 2);
        const auto party = static_cast<std::size_t>(held.below(
            static_cast<std::uint64_t>(cfg.parties)));
        out.held_out.labels[r] = label;
        draw_row(held, shifts[party], label, out.held_out.features, r);
    }
    return out;
}

}  // namespace mpcfl
