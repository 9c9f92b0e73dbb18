#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "specshare/rng.hpp"

namespace specshare::nn {

// Activations are stored one example per column.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class LayerKind { Dense, Conv2D, Dropout, Flatten, Softmax };
enum class Activation { Linear, Relu };
enum class Mode { Inference, Training };

std::string to_string(LayerKind kind);
std::string to_string(Activation act);

class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerKind kind() const = 0;
  virtual std::unique_ptr<Layer> clone() const = 0;
  virtual std::size_t input_size() const = 0;
  virtual std::size_t output_size() const = 0;

  // Forward caches what backward needs; backward stores parameter gradients and
  // returns the gradient with respect to the layer input.
  virtual Matrix forward(const Matrix& x, Mode mode, Rng& rng) = 0;
  virtual Matrix backward(const Matrix& grad_out) = 0;
  // Inference-mode forward without caching.
  virtual Matrix infer(const Matrix& x) const = 0;

  // Trainable parameters (weights then biases) and matching gradients.
  virtual std::span<double> params() { return {}; }
  virtual std::span<const double> params() const { return {}; }
  virtual std::span<const double> grads() const { return {}; }
  std::size_t param_count() const { return params().size(); }

  // Layer header line for the weight file, without the values.
  virtual std::string describe() const = 0;
};

// y = act(W x + b), W is out x in.
class Dense final : public Layer {
 public:
  Dense(std::size_t in, std::size_t out, Activation act);

  LayerKind kind() const override { return LayerKind::Dense; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dense>(*this); }
  std::size_t input_size() const override { return in_; }
  std::size_t output_size() const override { return out_; }
  Matrix forward(const Matrix& x, Mode mode, Rng& rng) override;
  Matrix backward(const Matrix& grad_out) override;
  Matrix infer(const Matrix& x) const override;
  std::span<double> params() override { return {params_.data(), size_t(params_.size())}; }
  std::span<const double> params() const override {
    return {params_.data(), size_t(params_.size())};
  }
  std::span<const double> grads() const override { return {grads_.data(), size_t(grads_.size())}; }
  std::string describe() const override;

  Activation activation() const { return act_; }
  void glorot_uniform(Rng& rng);

 private:
  Eigen::Map<Matrix> weights() { return {params_.data(), Eigen::Index(out_), Eigen::Index(in_)}; }
  Eigen::Map<Vector> bias() { return {params_.data() + in_ * out_, Eigen::Index(out_)}; }
  Eigen::Map<const Matrix> weights() const {
    return {params_.data(), Eigen::Index(out_), Eigen::Index(in_)};
  }
  Eigen::Map<const Vector> bias() const {
    return {params_.data() + in_ * out_, Eigen::Index(out_)};
  }
  Matrix affine(const Matrix& x) const;

  std::size_t in_;
  std::size_t out_;
  Activation act_;
  Vector params_;
  Vector grads_;
  Matrix input_;
  Matrix pre_activation_;
};

// Kernel (1, width) sliding along the time axis of each row of a rows x cols x 1
// input with "same" zero padding; output is rows x cols x filters, flattened with
// the filter index fastest.
class Conv2D final : public Layer {
 public:
  Conv2D(std::size_t rows, std::size_t cols, std::size_t filters, std::size_t kernel_width,
         Activation act);

  LayerKind kind() const override { return LayerKind::Conv2D; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv2D>(*this); }
  std::size_t input_size() const override { return rows_ * cols_; }
  std::size_t output_size() const override { return rows_ * cols_ * filters_; }
  Matrix forward(const Matrix& x, Mode mode, Rng& rng) override;
  Matrix backward(const Matrix& grad_out) override;
  Matrix infer(const Matrix& x) const override;
  std::span<double> params() override { return {params_.data(), size_t(params_.size())}; }
  std::span<const double> params() const override {
    return {params_.data(), size_t(params_.size())};
  }
  std::span<const double> grads() const override { return {grads_.data(), size_t(grads_.size())}; }
  std::string describe() const override;

  void glorot_uniform(Rng& rng);

 private:
  Eigen::Map<Matrix> kernel() {
    return {params_.data(), Eigen::Index(filters_), Eigen::Index(width_)};
  }
  Eigen::Map<Vector> bias() { return {params_.data() + filters_ * width_, Eigen::Index(filters_)}; }
  Eigen::Map<const Matrix> kernel() const {
    return {params_.data(), Eigen::Index(filters_), Eigen::Index(width_)};
  }
  Eigen::Map<const Vector> bias() const {
    return {params_.data() + filters_ * width_, Eigen::Index(filters_)};
  }
  Matrix patches(const Matrix& x) const;
  Matrix convolve(const Matrix& patches, Eigen::Index batch) const;

  std::size_t rows_;
  std::size_t cols_;
  std::size_t filters_;
  std::size_t width_;
  Activation act_;
  Vector params_;
  Vector grads_;
  Matrix patches_;
  Matrix pre_activation_;
};

// Inverted dropout: scales kept units by 1/(1-rate) in training, identity otherwise.
class Dropout final : public Layer {
 public:
  Dropout(std::size_t size, double rate);

  LayerKind kind() const override { return LayerKind::Dropout; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dropout>(*this); }
  std::size_t input_size() const override { return size_; }
  std::size_t output_size() const override { return size_; }
  Matrix forward(const Matrix& x, Mode mode, Rng& rng) override;
  Matrix backward(const Matrix& grad_out) override;
  Matrix infer(const Matrix& x) const override { return x; }
  std::string describe() const override;

  double rate() const { return rate_; }
  void set_rate(double rate);

 private:
  std::size_t size_;
  double rate_;
  Matrix mask_;
  bool masked_ = false;
};

class Flatten final : public Layer {
 public:
  explicit Flatten(std::size_t size) : size_(size) {}

  LayerKind kind() const override { return LayerKind::Flatten; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Flatten>(*this); }
  std::size_t input_size() const override { return size_; }
  std::size_t output_size() const override { return size_; }
  Matrix forward(const Matrix& x, Mode, Rng&) override { return x; }
  Matrix backward(const Matrix& grad_out) override { return grad_out; }
  Matrix infer(const Matrix& x) const override { return x; }
  std::string describe() const override;

 private:
  std::size_t size_;
};

// Column-wise softmax.
class Softmax final : public Layer {
 public:
  explicit Softmax(std::size_t size) : size_(size) {}

  LayerKind kind() const override { return LayerKind::Softmax; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Softmax>(*this); }
  std::size_t input_size() const override { return size_; }
  std::size_t output_size() const override { return size_; }
  Matrix forward(const Matrix& x, Mode mode, Rng& rng) override;
  Matrix backward(const Matrix& grad_out) override;
  Matrix infer(const Matrix& x) const override;
  std::string describe() const override;

 private:
  std::size_t size_;
  Matrix output_;
};

}  // namespace specshare::nn
