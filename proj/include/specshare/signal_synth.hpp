#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace specshare {

using Sample = std::complex<float>;

enum class Label : int { NoSignal = 0, Signal = 1 };

// One packet of complex baseband samples. Noise has unit power per sample.
struct IqPacket {
  std::vector<Sample> samples;  // signal + noise
  // Noise-free component; empty when the packet was read back from disk.
  std::vector<Sample> signal;
  double snr_db = 0.0;  // average SNR over fading; -inf for NoSignal
  Label label = Label::NoSignal;
  std::complex<double> fading_coeff{0.0, 0.0};

  std::size_t size() const { return samples.size(); }
  bool has_components() const { return signal.size() == samples.size(); }
  // samples - signal
  std::vector<Sample> noise() const;
};

// BPSK symbols through one flat Rayleigh coefficient per packet plus unit-power
// circular Gaussian noise. NoSignal packets are noise only.
IqPacket generate_packet(std::size_t n, Label label, double snr_db, std::uint64_t seed);

// Signal parts added over the noise realization of `a`.
IqPacket superpose(const IqPacket& a, const IqPacket& b);

// Everything needed to regenerate a dataset bit-for-bit.
struct DatasetManifest {
  int version = 1;
  std::size_t packet_len = 0;
  std::vector<double> snr_db;  // Signal packets cycle through this grid
  std::size_t n_signal = 0;
  std::size_t n_nosignal = 0;
  std::uint64_t seed = 0;
  double balance = 0.5;

  std::string to_text() const;
  static DatasetManifest parse(const std::string& text);

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

struct LabeledIqDataset {
  std::vector<IqPacket> packets;
  DatasetManifest manifest;

  std::size_t size() const { return packets.size(); }
  double class_balance() const;
};

// 2 * n_per_class packets of which round(balance * total) carry a signal, shuffled by a
// seed-derived permutation.
LabeledIqDataset generate_dataset(std::size_t n_per_class, std::size_t n, double snr_db,
                                  double balance, std::uint64_t seed);
// Same, with Signal packets spread evenly over an SNR grid.
LabeledIqDataset generate_dataset(std::size_t n_per_class, std::size_t n,
                                  const std::vector<double>& snr_grid, double balance,
                                  std::uint64_t seed);
LabeledIqDataset regenerate(const DatasetManifest& manifest);

// <base>.manifest, <base>.iq (little-endian float32, I/Q interleaved), <base>.labels.
void write_dataset(const LabeledIqDataset& data, const std::filesystem::path& base);
LabeledIqDataset read_dataset(const std::filesystem::path& base);

// Ratio of mean signal power to mean noise power over the Signal packets, in dB.
double measured_snr_db(const std::vector<IqPacket>& packets);

}  // namespace specshare
