#include "specshare/signal_synth.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "specshare/errors.hpp"
#include "specshare/rng.hpp"

namespace specshare {

namespace {

constexpr std::uint64_t kShuffleStream = 0xffffffffULL;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

void put_f32_le(std::ostream& out, float value) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  const char bytes[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                         static_cast<char>((bits >> 16) & 0xff),
                         static_cast<char>((bits >> 24) & 0xff)};
  out.write(bytes, 4);
}

float get_f32_le(const unsigned char* p) {
  const std::uint32_t bits = std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
                             (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
  return std::bit_cast<float>(bits);
}

std::filesystem::path with_suffix(const std::filesystem::path& base, const char* suffix) {
  return std::filesystem::path(base.string() + suffix);
}

}  // namespace

std::vector<Sample> IqPacket::noise() const {
  if (!has_components()) throw ArgumentError("packet carries no separate signal component");
  std::vector<Sample> out(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) out[k] = samples[k] - signal[k];
  return out;
}

IqPacket generate_packet(std::size_t n, Label label, double snr_db, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("packet length must be >= 1");
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  std::bernoulli_distribution coin(0.5);

  IqPacket pkt;
  pkt.label = label;
  pkt.samples.resize(n);
  pkt.signal.assign(n, Sample{0.0f, 0.0f});

  if (label == Label::Signal) {
    pkt.snr_db = snr_db;
    const double re = gauss(rng);
    const double im = gauss(rng);
    pkt.fading_coeff = {re, im};
    const std::complex<double> gain = std::sqrt(db_to_linear(snr_db)) * pkt.fading_coeff;
    for (std::size_t k = 0; k < n; ++k) {
      const double symbol = coin(rng) ? 1.0 : -1.0;
      pkt.signal[k] = Sample(gain * symbol);
    }
  } else {
    pkt.snr_db = -std::numeric_limits<double>::infinity();
  }

  for (std::size_t k = 0; k < n; ++k) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    pkt.samples[k] = pkt.signal[k] + Sample(static_cast<float>(re), static_cast<float>(im));
  }
  return pkt;
}

IqPacket superpose(const IqPacket& a, const IqPacket& b) {
  if (a.size() != b.size()) {
    throw ArgumentError(fmt::format("cannot superpose packets of length {} and {}", a.size(), b.size()));
  }
  if (!a.has_components() || !b.has_components()) {
    throw ArgumentError("superpose needs packets with a separate signal component");
  }
  IqPacket out;
  out.samples.resize(a.size());
  out.signal.resize(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    out.signal[k] = a.signal[k] + b.signal[k];
    out.samples[k] = a.samples[k] + b.signal[k];
  }
  const bool sa = a.label == Label::Signal;
  const bool sb = b.label == Label::Signal;
  out.label = (sa || sb) ? Label::Signal : Label::NoSignal;
  const double power = (sa ? db_to_linear(a.snr_db) : 0.0) + (sb ? db_to_linear(b.snr_db) : 0.0);
  out.snr_db = power > 0.0 ? 10.0 * std::log10(power) : -std::numeric_limits<double>::infinity();
  out.fading_coeff = sa ? a.fading_coeff : b.fading_coeff;
  return out;
}

std::string DatasetManifest::to_text() const {
  std::string snr;
  for (std::size_t i = 0; i < snr_db.size(); ++i) {
    snr += fmt::format("{}{:.17g}", i ? "," : "", snr_db[i]);
  }
  return fmt::format(
      "version={}\nn={}\nsnr_db={}\nn_signal={}\nn_nosignal={}\nseed={}\nbalance={:.17g}\n",
      version, packet_len, snr, n_signal, n_nosignal, seed, balance);
}

DatasetManifest DatasetManifest::parse(const std::string& text) {
  DatasetManifest m;
  std::stringstream ss(text);
  std::string line;
  int seen = 0;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("bad manifest line '{}'", line));
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "version") m.version = std::stoi(value);
      else if (key == "n") m.packet_len = std::stoull(value);
      else if (key == "snr_db") m.snr_db = parse_list(value);
      else if (key == "n_signal") m.n_signal = std::stoull(value);
      else if (key == "n_nosignal") m.n_nosignal = std::stoull(value);
      else if (key == "seed") m.seed = std::stoull(value);
      else if (key == "balance") m.balance = std::stod(value);
      else throw ConfigError(fmt::format("unknown manifest key '{}'", key));
    } catch (const std::logic_error&) {
      throw ConfigError(fmt::format("bad manifest value for '{}': '{}'", key, value));
    }
    ++seen;
  }
  if (seen < 7) throw ConfigError("manifest is missing keys");
  if (m.version != 1) throw ConfigError(fmt::format("unsupported manifest version {}", m.version));
  return m;
}

double LabeledIqDataset::class_balance() const {
  if (packets.empty()) return 0.0;
  const auto n_signal = std::count_if(packets.begin(), packets.end(),
                                      [](const IqPacket& p) { return p.label == Label::Signal; });
  return static_cast<double>(n_signal) / static_cast<double>(packets.size());
}

LabeledIqDataset regenerate(const DatasetManifest& m) {
  if (m.packet_len == 0) throw ArgumentError("packet length must be >= 1");
  if (m.n_signal > 0 && m.snr_db.empty()) throw ArgumentError("SNR grid is empty");

  const std::size_t total = m.n_signal + m.n_nosignal;
  LabeledIqDataset data;
  data.manifest = m;
  data.packets.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    const bool signal = i < m.n_signal;
    const double snr = signal ? m.snr_db[i % m.snr_db.size()] : 0.0;
    data.packets.push_back(generate_packet(m.packet_len, signal ? Label::Signal : Label::NoSignal,
                                           snr, derive_seed(m.seed, i)));
  }
  Rng shuffle_rng = make_rng(m.seed, kShuffleStream);
  std::shuffle(data.packets.begin(), data.packets.end(), shuffle_rng);
  return data;
}

LabeledIqDataset generate_dataset(std::size_t n_per_class, std::size_t n,
                                  const std::vector<double>& snr_grid, double balance,
                                  std::uint64_t seed) {
  if (n_per_class < 1) throw ArgumentError("n_per_class must be >= 1");
  if (!(balance >= 0.0 && balance <= 1.0)) throw ArgumentError("balance must be in [0,1]");
  DatasetManifest m;
  m.packet_len = n;
  m.snr_db = snr_grid;
  const std::size_t total = 2 * n_per_class;
  m.n_signal = static_cast<std::size_t>(std::llround(balance * static_cast<double>(total)));
  m.n_nosignal = total - m.n_signal;
  m.seed = seed;
  m.balance = balance;
  return regenerate(m);
}

LabeledIqDataset generate_dataset(std::size_t n_per_class, std::size_t n, double snr_db,
                                  double balance, std::uint64_t seed) {
  return generate_dataset(n_per_class, n, std::vector<double>{snr_db}, balance, seed);
}

void write_dataset(const LabeledIqDataset& data, const std::filesystem::path& base) {
  const auto manifest_path = with_suffix(base, ".manifest");
  const auto iq_path = with_suffix(base, ".iq");
  const auto labels_path = with_suffix(base, ".labels");

  std::ofstream manifest(manifest_path);
  std::ofstream iq(iq_path, std::ios::binary);
  std::ofstream labels(labels_path);
  if (!manifest || !iq || !labels) {
    throw std::runtime_error(fmt::format("cannot open dataset files at '{}'", base.string()));
  }
  manifest << data.manifest.to_text();
  for (const IqPacket& p : data.packets) {
    if (p.size() != data.manifest.packet_len) {
      throw ArgumentError("packet length disagrees with the manifest");
    }
    for (const Sample& s : p.samples) {
      put_f32_le(iq, s.real());
      put_f32_le(iq, s.imag());
    }
    labels << static_cast<int>(p.label) << '\n';
  }
  if (!manifest || !iq || !labels) {
    throw std::runtime_error(fmt::format("write failed for dataset '{}'", base.string()));
  }
}

LabeledIqDataset read_dataset(const std::filesystem::path& base) {
  const auto manifest_path = with_suffix(base, ".manifest");
  std::ifstream manifest(manifest_path);
  if (!manifest) throw ConfigError(fmt::format("cannot read '{}'", manifest_path.string()));
  std::stringstream text;
  text << manifest.rdbuf();

  LabeledIqDataset data;
  data.manifest = DatasetManifest::parse(text.str());
  const std::size_t n = data.manifest.packet_len;
  const std::size_t total = data.manifest.n_signal + data.manifest.n_nosignal;

  std::ifstream labels(with_suffix(base, ".labels"));
  std::ifstream iq(with_suffix(base, ".iq"), std::ios::binary);
  if (!labels || !iq) throw ConfigError(fmt::format("cannot read dataset '{}'", base.string()));

  std::vector<unsigned char> raw(n * 8);
  for (std::size_t i = 0; i < total; ++i) {
    int label = -1;
    if (!(labels >> label) || (label != 0 && label != 1)) {
      throw ConfigError(fmt::format("bad label on line {} of '{}.labels'", i + 1, base.string()));
    }
    if (!iq.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
      throw ConfigError(fmt::format("'{}.iq' is truncated at packet {}", base.string(), i));
    }
    IqPacket p;
    p.label = static_cast<Label>(label);
    p.snr_db = std::numeric_limits<double>::quiet_NaN();
    p.samples.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      p.samples[k] = {get_f32_le(&raw[8 * k]), get_f32_le(&raw[8 * k + 4])};
    }
    data.packets.push_back(std::move(p));
  }
  return data;
}

double measured_snr_db(const std::vector<IqPacket>& packets) {
  double signal_energy = 0.0;
  double noise_energy = 0.0;
  for (const IqPacket& p : packets) {
    if (p.label != Label::Signal) continue;
    const auto noise = p.noise();
    for (std::size_t k = 0; k < p.size(); ++k) {
      signal_energy += std::norm(std::complex<double>(p.signal[k]));
      noise_energy += std::norm(std::complex<double>(noise[k]));
    }
  }
  if (noise_energy <= 0.0) throw ArgumentError("no Signal packets to measure");
  return 10.0 * std::log10(signal_energy / noise_energy);
}

}  // namespace specshare
