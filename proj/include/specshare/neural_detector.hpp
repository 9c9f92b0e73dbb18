#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "specshare/nn_layers.hpp"
#include "specshare/occupancy_model.hpp"
#include "specshare/signal_synth.hpp"

namespace specshare {

// Ordered stack of layers ending in a 2-way softmax (index 0 = NoSignal, 1 = Signal).
class NetworkModel {
 public:
  NetworkModel() = default;
  NetworkModel(std::string architecture, std::size_t packet_len);
  NetworkModel(const NetworkModel& other);
  NetworkModel& operator=(const NetworkModel& other);
  NetworkModel(NetworkModel&&) noexcept = default;
  NetworkModel& operator=(NetworkModel&&) noexcept = default;

  void add(std::unique_ptr<nn::Layer> layer);

  const std::string& architecture() const { return architecture_; }
  std::size_t packet_len() const { return packet_len_; }
  std::size_t input_size() const { return 2 * packet_len_; }
  std::size_t parameter_count() const;
  std::size_t layer_count() const { return layers_.size(); }
  const nn::Layer& layer(std::size_t i) const { return *layers_.at(i); }
  nn::Layer& layer(std::size_t i) { return *layers_.at(i); }

  bool trained() const { return trained_; }
  void mark_trained(bool value = true) { trained_ = value; }

  // Class probabilities, one column per example.
  nn::Matrix forward(const nn::Matrix& x, nn::Mode mode, Rng& rng);
  nn::Matrix predict(const nn::Matrix& x) const;
  // Backpropagates d(loss)/d(output) through every layer.
  void backward(const nn::Matrix& grad_output);

  // Mean categorical cross-entropy of `probs` against integer labels.
  static double cross_entropy(const nn::Matrix& probs, std::span<const int> labels);
  // Forward with dropout disabled, backward of the mean cross-entropy; returns the loss.
  double loss_and_gradient(const nn::Matrix& x, std::span<const int> labels);

  // All trainable values flattened in layer order.
  std::vector<double> flat_parameters() const;
  std::vector<double> flat_gradients() const;
  void set_flat_parameters(std::span<const double> values);

 private:
  std::string architecture_;
  std::size_t packet_len_ = 0;
  std::vector<std::unique_ptr<nn::Layer>> layers_;
  bool trained_ = false;
};

// Dense64-Drop-Dense16-Drop-Dense4-Drop-Dense2-softmax on 2N inputs; 128N + 1182 parameters.
NetworkModel build_fnn(std::size_t n_samples, std::uint64_t seed = 0, double dropout_rate = 0.1);
// Conv(1,3)x32 same-padded on a 2 x N x 1 input, Flatten, Dense32-Drop-Dense8-Drop-Dense2-softmax;
// 2048N + 442 parameters.
NetworkModel build_cnn(std::size_t n_samples, std::uint64_t seed = 0, double dropout_rate = 0.1);

inline constexpr std::size_t kCnnFilters = 32;
inline constexpr std::size_t kCnnKernelWidth = 3;

struct TrainConfig {
  int epochs = 30;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double dropout_rate = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainResult {
  NetworkModel model;
  std::vector<double> loss_history;  // mean mini-batch loss per epoch
};

// Adam on categorical cross-entropy; deterministic given cfg.seed.
TrainResult train(NetworkModel model, const LabeledIqDataset& data, const TrainConfig& cfg);

struct DetectionReport {
  double accuracy = 0.0;
  double pm = 0.0;  // P(predict NoSignal | Signal)
  double pf = 0.0;  // P(predict Signal | NoSignal)
  std::size_t n_signal = 0;
  std::size_t n_nosignal = 0;
};

struct SnrAccuracy {
  double snr_db = 0.0;
  DetectionReport report;
};

// Packets as a 2N x batch matrix; column layout is I_0..I_{N-1}, Q_0..Q_{N-1}.
nn::Matrix packets_to_matrix(const std::vector<IqPacket>& packets);
std::vector<int> labels_of(const std::vector<IqPacket>& packets);

// Returns true for every packet classified as Signal.
std::vector<bool> classify(const NetworkModel& model, const std::vector<IqPacket>& packets);
bool classify(const NetworkModel& model, const IqPacket& packet);

DetectionReport evaluate(const NetworkModel& model, const LabeledIqDataset& data);
DetectionReport evaluate(const NetworkModel& model, const std::vector<IqPacket>& packets);
std::vector<SnrAccuracy> evaluate_curve(const NetworkModel& model, const std::vector<double>& snr_grid,
                                        std::size_t n_per_class, std::uint64_t seed);

// Detection SNRs (dB) seen by the secondary sensing T1 and by the jammer sensing T1 and T2.
struct DetectionSnrs {
  double incumbent_at_secondary = 0.0;
  double incumbent_at_jammer = 0.0;
  double secondary_at_jammer = 0.0;
};

// Secondary errors from the CNN, jammer errors from the FNN; the combined T1+T2 case uses
// superposed packets.
DetectorErrorProfile extract_error_profile(const NetworkModel& cnn, const NetworkModel& fnn,
                                           const DetectionSnrs& snrs, std::size_t n_per_class,
                                           std::uint64_t seed);

void save_model(const NetworkModel& model, const std::filesystem::path& path);
NetworkModel load_model(const std::filesystem::path& path);

}  // namespace specshare
