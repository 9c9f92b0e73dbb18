#include "specshare/neural_detector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "specshare/errors.hpp"

namespace specshare {

using nn::Activation;
using nn::Matrix;
using nn::Mode;

namespace {

constexpr std::size_t kInferenceChunk = 1024;
constexpr double kProbFloor = 1e-300;

enum Stream : std::uint64_t {
  kInitStream = 1,
  kTrainStream = 2,
  kSecondaryData = 11,
  kJammerT1Data = 12,
  kJammerT2Data = 13,
  kJammerIdleData = 14,
};

std::unique_ptr<nn::Layer> dense(std::size_t in, std::size_t out, Activation act, Rng& rng) {
  auto layer = std::make_unique<nn::Dense>(in, out, act);
  layer->glorot_uniform(rng);
  return layer;
}

}  // namespace

// NetworkModel

NetworkModel::NetworkModel(std::string architecture, std::size_t packet_len)
    : architecture_(std::move(architecture)), packet_len_(packet_len) {}

NetworkModel::NetworkModel(const NetworkModel& other)
    : architecture_(other.architecture_), packet_len_(other.packet_len_), trained_(other.trained_) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

NetworkModel& NetworkModel::operator=(const NetworkModel& other) {
  if (this != &other) {
    NetworkModel copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void NetworkModel::add(std::unique_ptr<nn::Layer> layer) {
  const std::size_t expected = layers_.empty() ? input_size() : layers_.back()->output_size();
  if (layer->input_size() != expected) {
    throw ArgumentError(fmt::format("layer '{}' takes {} inputs but the previous stage yields {}",
                                    layer->describe(), layer->input_size(), expected));
  }
  layers_.push_back(std::move(layer));
}

std::size_t NetworkModel::parameter_count() const {
  std::size_t total = 0;
  for (const auto& l : layers_) total += l->param_count();
  return total;
}

Matrix NetworkModel::forward(const Matrix& x, Mode mode, Rng& rng) {
  Matrix a = x;
  for (auto& l : layers_) a = l->forward(a, mode, rng);
  return a;
}

Matrix NetworkModel::predict(const Matrix& x) const {
  Matrix a = x;
  for (const auto& l : layers_) a = l->infer(a);
  return a;
}

void NetworkModel::backward(const Matrix& grad_output) {
  Matrix g = grad_output;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
}

double NetworkModel::cross_entropy(const Matrix& probs, std::span<const int> labels) {
  if (static_cast<std::size_t>(probs.cols()) != labels.size()) {
    throw ArgumentError("label count does not match the batch");
  }
  double loss = 0.0;
  for (Eigen::Index j = 0; j < probs.cols(); ++j) {
    loss -= std::log(std::max(probs(labels[j], j), kProbFloor));
  }
  return loss / static_cast<double>(probs.cols());
}

namespace {

// d(mean cross-entropy)/d(probabilities).
Matrix cross_entropy_grad(const Matrix& probs, std::span<const int> labels) {
  Matrix g = Matrix::Zero(probs.rows(), probs.cols());
  const double scale = 1.0 / static_cast<double>(probs.cols());
  for (Eigen::Index j = 0; j < probs.cols(); ++j) {
    g(labels[j], j) = -scale / std::max(probs(labels[j], j), kProbFloor);
  }
  return g;
}

}  // namespace

double NetworkModel::loss_and_gradient(const Matrix& x, std::span<const int> labels) {
  Rng unused(0);
  const Matrix probs = forward(x, Mode::Inference, unused);
  backward(cross_entropy_grad(probs, labels));
  return cross_entropy(probs, labels);
}

std::vector<double> NetworkModel::flat_parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& l : layers_) {
    const nn::Layer& cl = *l;
    auto p = cl.params();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

std::vector<double> NetworkModel::flat_gradients() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& l : layers_) {
    auto g = l->grads();
    out.insert(out.end(), g.begin(), g.end());
  }
  return out;
}

void NetworkModel::set_flat_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    throw ArgumentError(fmt::format("expected {} parameters, got {}", parameter_count(), values.size()));
  }
  std::size_t offset = 0;
  for (auto& l : layers_) {
    auto p = l->params();
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(offset), p.size(), p.begin());
    offset += p.size();
  }
}

// Builders

NetworkModel build_fnn(std::size_t n_samples, std::uint64_t seed, double dropout_rate) {
  if (n_samples < 1) throw ArgumentError("packet length must be >= 1");
  Rng rng = make_rng(seed, kInitStream);
  NetworkModel model("fnn", n_samples);
  const std::size_t in = 2 * n_samples;
  model.add(dense(in, 64, Activation::Relu, rng));
  model.add(std::make_unique<nn::Dropout>(64, dropout_rate));
  model.add(dense(64, 16, Activation::Relu, rng));
  model.add(std::make_unique<nn::Dropout>(16, dropout_rate));
  model.add(dense(16, 4, Activation::Relu, rng));
  model.add(std::make_unique<nn::Dropout>(4, dropout_rate));
  model.add(dense(4, 2, Activation::Linear, rng));
  model.add(std::make_unique<nn::Softmax>(2));

  const std::size_t expected = 128 * n_samples + 1182;
  if (model.parameter_count() != expected) {
    throw std::logic_error(fmt::format("FNN has {} parameters, expected {}", model.parameter_count(), expected));
  }
  return model;
}

NetworkModel build_cnn(std::size_t n_samples, std::uint64_t seed, double dropout_rate) {
  if (n_samples < kCnnKernelWidth) {
    throw ArgumentError(fmt::format("CNN needs at least {} samples per packet, got {}",
                                    kCnnKernelWidth, n_samples));
  }
  Rng rng = make_rng(seed, kInitStream);
  NetworkModel model("cnn", n_samples);
  auto conv = std::make_unique<nn::Conv2D>(2, n_samples, kCnnFilters, kCnnKernelWidth,
                                           Activation::Relu);
  conv->glorot_uniform(rng);
  const std::size_t flat = conv->output_size();
  model.add(std::move(conv));
  model.add(std::make_unique<nn::Flatten>(flat));
  model.add(dense(flat, 32, Activation::Relu, rng));
  model.add(std::make_unique<nn::Dropout>(32, dropout_rate));
  model.add(dense(32, 8, Activation::Relu, rng));
  model.add(std::make_unique<nn::Dropout>(8, dropout_rate));
  model.add(dense(8, 2, Activation::Linear, rng));
  model.add(std::make_unique<nn::Softmax>(2));

  const std::size_t expected = 2048 * n_samples + 442;
  if (model.parameter_count() != expected) {
    throw std::logic_error(fmt::format("CNN has {} parameters, expected {}", model.parameter_count(), expected));
  }
  return model;
}

// Training

void TrainConfig::validate() const {
  if (epochs < 0) throw ArgumentError("epochs must be >= 0");
  if (batch_size < 1) throw ArgumentError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ArgumentError("learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ArgumentError("Adam betas must lie in [0,1)");
  }
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be > 0");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ArgumentError("dropout_rate must lie in [0,1)");
}

Matrix packets_to_matrix(const std::vector<IqPacket>& packets) {
  if (packets.empty()) return Matrix(0, 0);
  const std::size_t n = packets.front().size();
  Matrix x(Eigen::Index(2 * n), Eigen::Index(packets.size()));
  for (std::size_t j = 0; j < packets.size(); ++j) {
    const IqPacket& p = packets[j];
    if (p.size() != n) throw ArgumentError("packets of different lengths in one batch");
    for (std::size_t k = 0; k < n; ++k) {
      x(Eigen::Index(k), Eigen::Index(j)) = p.samples[k].real();
      x(Eigen::Index(n + k), Eigen::Index(j)) = p.samples[k].imag();
    }
  }
  return x;
}

std::vector<int> labels_of(const std::vector<IqPacket>& packets) {
  std::vector<int> out(packets.size());
  std::transform(packets.begin(), packets.end(), out.begin(),
                 [](const IqPacket& p) { return static_cast<int>(p.label); });
  return out;
}

namespace {

void require_shape(const NetworkModel& model, std::size_t packet_len) {
  if (model.packet_len() != packet_len) {
    throw ArgumentError(fmt::format("{} model expects {} samples per packet, data has {}",
                                    model.architecture(), model.packet_len(), packet_len));
  }
}

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
};

void adam_update(NetworkModel& model, std::vector<AdamState>& state, const TrainConfig& cfg) {
  for (std::size_t li = 0; li < model.layer_count(); ++li) {
    nn::Layer& layer = model.layer(li);
    auto params = layer.params();
    if (params.empty()) continue;
    auto grads = layer.grads();
    AdamState& s = state[li];
    if (s.m.empty()) {
      s.m.assign(params.size(), 0.0);
      s.v.assign(params.size(), 0.0);
    }
    ++s.step;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(s.step));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(s.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
      s.m[i] = cfg.beta1 * s.m[i] + (1.0 - cfg.beta1) * grads[i];
      s.v[i] = cfg.beta2 * s.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
      const double m_hat = s.m[i] / c1;
      const double v_hat = s.v[i] / c2;
      params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

}  // namespace

TrainResult train(NetworkModel model, const LabeledIqDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.packets.empty()) throw ArgumentError("training set is empty");
  require_shape(model, data.packets.front().size());

  for (std::size_t li = 0; li < model.layer_count(); ++li) {
    if (auto* drop = dynamic_cast<nn::Dropout*>(&model.layer(li))) drop->set_rate(cfg.dropout_rate);
  }

  const Matrix x = packets_to_matrix(data.packets);
  const std::vector<int> labels = labels_of(data.packets);
  const std::size_t total = labels.size();

  Rng rng = make_rng(cfg.seed, kTrainStream);
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<AdamState> state(model.layer_count());

  TrainResult result;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < total; start += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, total - start);
      Matrix xb(x.rows(), Eigen::Index(count));
      std::vector<int> yb(count);
      for (std::size_t j = 0; j < count; ++j) {
        xb.col(Eigen::Index(j)) = x.col(Eigen::Index(order[start + j]));
        yb[j] = labels[order[start + j]];
      }
      const Matrix probs = model.forward(xb, Mode::Training, rng);
      const double loss = NetworkModel::cross_entropy(probs, yb);
      if (!std::isfinite(loss)) {
        throw TrainingError(fmt::format("training diverged at epoch {} (loss {})", epoch + 1, loss));
      }
      model.backward(cross_entropy_grad(probs, yb));
      adam_update(model, state, cfg);
      loss_sum += loss;
      ++batches;
    }
    result.loss_history.push_back(loss_sum / static_cast<double>(batches));
  }
  if (cfg.epochs > 0) model.mark_trained();
  result.model = std::move(model);
  return result;
}

// Evaluation

std::vector<bool> classify(const NetworkModel& model, const std::vector<IqPacket>& packets) {
  std::vector<bool> out;
  out.reserve(packets.size());
  for (std::size_t start = 0; start < packets.size(); start += kInferenceChunk) {
    const std::size_t end = std::min(packets.size(), start + kInferenceChunk);
    std::vector<IqPacket> chunk(packets.begin() + std::ptrdiff_t(start),
                                packets.begin() + std::ptrdiff_t(end));
    require_shape(model, chunk.front().size());
    const Matrix probs = model.predict(packets_to_matrix(chunk));
    for (Eigen::Index j = 0; j < probs.cols(); ++j) out.push_back(probs(1, j) > probs(0, j));
  }
  return out;
}

bool classify(const NetworkModel& model, const IqPacket& packet) {
  require_shape(model, packet.size());
  Matrix x(Eigen::Index(2 * packet.size()), 1);
  for (std::size_t k = 0; k < packet.size(); ++k) {
    x(Eigen::Index(k), 0) = packet.samples[k].real();
    x(Eigen::Index(packet.size() + k), 0) = packet.samples[k].imag();
  }
  const Matrix probs = model.predict(x);
  return probs(1, 0) > probs(0, 0);
}

DetectionReport evaluate(const NetworkModel& model, const std::vector<IqPacket>& packets) {
  if (packets.empty()) throw ArgumentError("evaluation set is empty");
  const std::vector<bool> said_signal = classify(model, packets);
  DetectionReport r;
  std::size_t misses = 0;
  std::size_t false_alarms = 0;
  for (std::size_t i = 0; i < packets.size(); ++i) {
    if (packets[i].label == Label::Signal) {
      ++r.n_signal;
      if (!said_signal[i]) ++misses;
    } else {
      ++r.n_nosignal;
      if (said_signal[i]) ++false_alarms;
    }
  }
  r.pm = r.n_signal ? static_cast<double>(misses) / static_cast<double>(r.n_signal) : 0.0;
  r.pf = r.n_nosignal ? static_cast<double>(false_alarms) / static_cast<double>(r.n_nosignal) : 0.0;
  r.accuracy = static_cast<double>(packets.size() - misses - false_alarms) /
               static_cast<double>(packets.size());
  return r;
}

DetectionReport evaluate(const NetworkModel& model, const LabeledIqDataset& data) {
  if (!data.packets.empty()) require_shape(model, data.manifest.packet_len);
  return evaluate(model, data.packets);
}

std::vector<SnrAccuracy> evaluate_curve(const NetworkModel& model, const std::vector<double>& snr_grid,
                                        std::size_t n_per_class, std::uint64_t seed) {
  std::vector<SnrAccuracy> curve;
  for (std::size_t i = 0; i < snr_grid.size(); ++i) {
    const auto data =
        generate_dataset(n_per_class, model.packet_len(), snr_grid[i], 0.5, derive_seed(seed, i));
    curve.push_back({snr_grid[i], evaluate(model, data)});
  }
  return curve;
}

namespace {

std::vector<IqPacket> packets_at(std::size_t count, std::size_t n, Label label, double snr_db,
                                 std::uint64_t seed) {
  std::vector<IqPacket> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(generate_packet(n, label, snr_db, derive_seed(seed, i)));
  }
  return out;
}

double miss_rate(const NetworkModel& model, const std::vector<IqPacket>& signal_packets) {
  const auto said = classify(model, signal_packets);
  const auto misses = std::count(said.begin(), said.end(), false);
  return static_cast<double>(misses) / static_cast<double>(said.size());
}

}  // namespace

DetectorErrorProfile extract_error_profile(const NetworkModel& cnn, const NetworkModel& fnn,
                                           const DetectionSnrs& snrs, std::size_t n_per_class,
                                           std::uint64_t seed) {
  if (!cnn.trained() || !fnn.trained()) {
    throw ArgumentError("error profiles need trained detectors");
  }
  if (n_per_class < 1) throw ArgumentError("n_per_class must be >= 1");

  DetectorErrorProfile profile;
  const auto sensing = generate_dataset(n_per_class, cnn.packet_len(), snrs.incumbent_at_secondary,
                                        0.5, derive_seed(seed, kSecondaryData));
  const DetectionReport secondary = evaluate(cnn, sensing);
  profile.pm = secondary.pm;
  profile.pf = secondary.pf;

  const std::size_t n = fnn.packet_len();
  const auto from_t1 = packets_at(n_per_class, n, Label::Signal, snrs.incumbent_at_jammer,
                                  derive_seed(seed, kJammerT1Data));
  const auto from_t2 = packets_at(n_per_class, n, Label::Signal, snrs.secondary_at_jammer,
                                  derive_seed(seed, kJammerT2Data));
  std::vector<IqPacket> combined;
  combined.reserve(n_per_class);
  for (std::size_t i = 0; i < n_per_class; ++i) combined.push_back(superpose(from_t1[i], from_t2[i]));
  const auto idle =
      packets_at(n_per_class, n, Label::NoSignal, 0.0, derive_seed(seed, kJammerIdleData));

  profile.pm1 = miss_rate(fnn, from_t1);
  profile.pm2 = miss_rate(fnn, from_t2);
  profile.pm12 = miss_rate(fnn, combined);
  profile.pf_j = 1.0 - miss_rate(fnn, idle);
  return profile;
}

// Weight files

void save_model(const NetworkModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write model file '{}'", path.string()));
  out << fmt::format("specshare-model {} {} {} {}\n", model.architecture(), model.packet_len(),
                     model.parameter_count(), model.trained() ? "trained" : "untrained");
  for (std::size_t li = 0; li < model.layer_count(); ++li) {
    const nn::Layer& layer = model.layer(li);
    out << layer.describe() << '\n';
    const auto params = layer.params();
    if (params.empty()) continue;
    for (std::size_t i = 0; i < params.size(); ++i) {
      out << (i ? " " : "") << fmt::format("{:.17g}", params[i]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", path.string()));
}

NetworkModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read model file '{}'", path.string()));
  auto fail = [&](const std::string& what) {
    return ConfigError(fmt::format("'{}': {}", path.string(), what));
  };

  std::string magic, arch, status;
  std::size_t packet_len = 0, declared = 0;
  if (!(in >> magic >> arch >> packet_len >> declared >> status) || magic != "specshare-model") {
    throw fail("missing model header");
  }
  NetworkModel model(arch, packet_len);
  std::string kind;
  while (in >> kind) {
    std::unique_ptr<nn::Layer> layer;
    if (kind == "dense") {
      std::size_t i = 0, o = 0;
      std::string act;
      if (!(in >> i >> o >> act)) throw fail("bad dense header");
      layer = std::make_unique<nn::Dense>(i, o, act == "relu" ? Activation::Relu : Activation::Linear);
    } else if (kind == "conv2d") {
      std::size_t r = 0, c = 0, f = 0, w = 0;
      std::string act;
      if (!(in >> r >> c >> f >> w >> act)) throw fail("bad conv2d header");
      layer = std::make_unique<nn::Conv2D>(r, c, f, w, act == "relu" ? Activation::Relu : Activation::Linear);
    } else if (kind == "dropout") {
      std::size_t s = 0;
      double rate = 0.0;
      if (!(in >> s >> rate)) throw fail("bad dropout header");
      layer = std::make_unique<nn::Dropout>(s, rate);
    } else if (kind == "flatten" || kind == "softmax") {
      std::size_t s = 0;
      if (!(in >> s)) throw fail(fmt::format("bad {} header", kind));
      if (kind == "flatten") layer = std::make_unique<nn::Flatten>(s);
      else layer = std::make_unique<nn::Softmax>(s);
    } else {
      throw fail(fmt::format("unknown layer kind '{}'", kind));
    }
    for (double& v : layer->params()) {
      if (!(in >> v)) throw fail(fmt::format("truncated values in layer '{}'", layer->describe()));
    }
    model.add(std::move(layer));
  }
  if (model.parameter_count() != declared) {
    throw fail(fmt::format("header declares {} parameters but layers hold {}", declared,
                           model.parameter_count()));
  }
  model.mark_trained(status == "trained");
  return model;
}

}  // namespace specshare
