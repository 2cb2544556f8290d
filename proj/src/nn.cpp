#include "scirel/nn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace scirel::nn {

Array Array::zeros(std::vector<std::size_t> shape) {
  std::size_t total = 1;
  for (std::size_t d : shape) total *= d;
  Array a;
  a.shape = std::move(shape);
  a.data.assign(total, 0.0);
  return a;
}

Array Array::from_table(const embeddings::EmbeddingTable& table) {
  Array a;
  a.shape = {table.rows, table.dim};
  a.data = table.data;
  return a;
}

std::size_t Array::stride() const {
  std::size_t s = 1;
  for (std::size_t i = 1; i < shape.size(); ++i) s *= shape[i];
  return s;
}

Array& ParamStore::add(std::string name, Array value, bool pad_row_frozen) {
  entries.push_back({std::move(name), std::move(value), pad_row_frozen});
  return entries.back().value;
}

Array& ParamStore::get(std::string_view name) {
  for (auto& entry : entries)
    if (entry.name == name) return entry.value;
  throw std::out_of_range("no parameter named " + std::string(name));
}

const Array& ParamStore::get(std::string_view name) const {
  for (const auto& entry : entries)
    if (entry.name == name) return entry.value;
  throw std::out_of_range("no parameter named " + std::string(name));
}

bool ParamStore::has(std::string_view name) const {
  return std::any_of(entries.begin(), entries.end(),
                     [&](const Entry& e) { return e.name == name; });
}

ParamStore ParamStore::zeros_like() const {
  ParamStore out;
  out.entries.reserve(entries.size());
  for (const auto& entry : entries)
    out.entries.push_back({entry.name, Array::zeros(entry.value.shape), entry.pad_row_frozen});
  return out;
}

// --- layers -----------------------------------------------------------------

Array embed_concat(const std::vector<const Array*>& tables,
                   const std::vector<std::vector<int>>& ids) {
  if (tables.size() != ids.size())
    throw std::invalid_argument("embed_concat: one id sequence per table required");
  if (tables.empty()) throw std::invalid_argument("embed_concat: no channels");
  std::size_t n = ids[0].size();
  std::size_t total_dim = 0;
  for (std::size_t c = 0; c < tables.size(); ++c) {
    if (ids[c].size() != n)
      throw std::invalid_argument("embed_concat: ragged id sequences");
    total_dim += tables[c]->cols();
  }

  Array out = Array::zeros({n, total_dim});
  for (std::size_t t = 0; t < n; ++t) {
    double* row = out.row(t);
    std::size_t offset = 0;
    for (std::size_t c = 0; c < tables.size(); ++c) {
      const Array& table = *tables[c];
      std::size_t dim = table.cols();
      int id = ids[c][t];
      if (id < 0 || static_cast<std::size_t>(id) >= table.rows())
        throw std::out_of_range("embed_concat: id " + std::to_string(id) +
                                " out of range for channel " + std::to_string(c));
      std::memcpy(row + offset, table.row(static_cast<std::size_t>(id)),
                  dim * sizeof(double));
      offset += dim;
    }
  }
  return out;
}

void embed_concat_backward(const Array& grad_out, const std::vector<std::vector<int>>& ids,
                           std::vector<Array*> table_grads) {
  std::size_t n = grad_out.rows();
  for (std::size_t t = 0; t < n; ++t) {
    const double* row = grad_out.row(t);
    std::size_t offset = 0;
    for (std::size_t c = 0; c < table_grads.size(); ++c) {
      Array& grad = *table_grads[c];
      std::size_t dim = grad.cols();
      double* target = grad.row(static_cast<std::size_t>(ids[c][t]));
      for (std::size_t j = 0; j < dim; ++j) target[j] += row[offset + j];
      offset += dim;
    }
  }
}

Array conv1d_relu(const Array& input, const Array& filters, const Array& bias) {
  if (input.shape.size() != 2 || filters.shape.size() != 3 || bias.shape.size() != 1)
    throw std::invalid_argument("conv1d_relu: expected input n x D, filters F x h x D, bias F");
  const std::size_t n = input.shape[0];
  const std::size_t d = input.shape[1];
  const std::size_t f_count = filters.shape[0];
  const std::size_t h = filters.shape[1];
  if (filters.shape[2] != d)
    throw std::invalid_argument("conv1d_relu: filter width does not match input dim");
  if (bias.shape[0] != f_count)
    throw std::invalid_argument("conv1d_relu: bias size does not match filter count");
  if (n < h) throw std::invalid_argument("conv1d_relu: input shorter than filter height");

  const std::size_t out_len = n - h + 1;
  const std::size_t window = h * d;
  Array out = Array::zeros({out_len, f_count});
  // each window and each filter is a contiguous block of h*D doubles;
  // four fixed-order accumulators keep the reduction vectorizable and
  // bit-reproducible
  for (std::size_t t = 0; t < out_len; ++t) {
    const double* win = input.data.data() + t * d;
    double* out_row = out.row(t);
    for (std::size_t f = 0; f < f_count; ++f) {
      const double* filt = filters.data.data() + f * window;
      double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
      std::size_t k = 0;
      for (; k + 4 <= window; k += 4) {
        acc0 += win[k] * filt[k];
        acc1 += win[k + 1] * filt[k + 1];
        acc2 += win[k + 2] * filt[k + 2];
        acc3 += win[k + 3] * filt[k + 3];
      }
      double acc = bias.data[f] + ((acc0 + acc1) + (acc2 + acc3));
      for (; k < window; ++k) acc += win[k] * filt[k];
      out_row[f] = acc > 0.0 ? acc : 0.0;
    }
  }
  return out;
}

ConvGrads conv1d_relu_backward(const Array& input, const Array& filters, const Array& output,
                               const Array& grad_out) {
  const std::size_t d = input.shape[1];
  const std::size_t f_count = filters.shape[0];
  const std::size_t h = filters.shape[1];
  const std::size_t out_len = output.shape[0];
  const std::size_t window = h * d;

  ConvGrads grads;
  grads.input = Array::zeros(input.shape);
  grads.filters = Array::zeros(filters.shape);
  grads.bias = Array::zeros({f_count});

  for (std::size_t t = 0; t < out_len; ++t) {
    const double* win = input.data.data() + t * d;
    double* gwin = grads.input.data.data() + t * d;
    const double* out_row = output.row(t);
    const double* gout_row = grad_out.row(t);
    for (std::size_t f = 0; f < f_count; ++f) {
      if (out_row[f] <= 0.0) continue;  // ReLU gate
      double g = gout_row[f];
      if (g == 0.0) continue;
      const double* filt = filters.data.data() + f * window;
      double* gfilt = grads.filters.data.data() + f * window;
      grads.bias.data[f] += g;
      for (std::size_t k = 0; k < window; ++k) {
        gfilt[k] += g * win[k];
        gwin[k] += g * filt[k];
      }
    }
  }
  return grads;
}

MaxPool max_pool(const Array& maps) {
  if (maps.shape.size() != 2 || maps.shape[0] == 0)
    throw std::invalid_argument("max_pool: empty feature maps");
  const std::size_t m = maps.shape[0];
  const std::size_t f_count = maps.shape[1];
  MaxPool out;
  out.values.assign(f_count, 0.0);
  out.argmax.assign(f_count, 0);
  for (std::size_t f = 0; f < f_count; ++f) {
    double best = maps.row(0)[f];
    std::size_t best_t = 0;
    for (std::size_t t = 1; t < m; ++t) {
      double v = maps.row(t)[f];
      if (v > best) {  // first occurrence wins ties
        best = v;
        best_t = t;
      }
    }
    out.values[f] = best;
    out.argmax[f] = best_t;
  }
  return out;
}

Array max_pool_backward(const MaxPool& pooled, std::size_t n_positions,
                        const std::vector<double>& grad_out) {
  Array grads = Array::zeros({n_positions, pooled.values.size()});
  for (std::size_t f = 0; f < pooled.values.size(); ++f)
    grads.row(pooled.argmax[f])[f] = grad_out[f];
  return grads;
}

std::vector<double> dense_softmax(const std::vector<double>& x, const Array& w,
                                  const Array& b) {
  const std::size_t classes = w.shape[0];
  const std::size_t k = w.shape[1];
  if (x.size() != k || b.shape[0] != classes)
    throw std::invalid_argument("dense_softmax: shape mismatch");
  std::vector<double> logits(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    const double* row = w.row(c);
    double acc = b.data[c];
    for (std::size_t j = 0; j < k; ++j) acc += row[j] * x[j];
    logits[c] = acc;
  }
  double max_logit = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& l : logits) {
    l = std::exp(l - max_logit);
    total += l;
  }
  for (double& l : logits) l /= total;
  return logits;
}

DenseSoftmaxResult dense_softmax_xent(const std::vector<double>& x, const Array& w,
                                      const Array& b, int label) {
  const std::size_t classes = w.shape[0];
  if (label < 0 || static_cast<std::size_t>(label) >= classes)
    throw std::invalid_argument("dense_softmax_xent: label out of range");

  DenseSoftmaxResult result;
  result.probs = dense_softmax(x, w, b);
  result.loss = -std::log(std::max(result.probs[static_cast<std::size_t>(label)],
                                   std::numeric_limits<double>::min()));

  std::vector<double> dlogits = result.probs;
  dlogits[static_cast<std::size_t>(label)] -= 1.0;

  const std::size_t k = w.shape[1];
  result.grad_w = Array::zeros(w.shape);
  result.grad_b = Array::zeros(b.shape);
  result.grad_x.assign(k, 0.0);
  for (std::size_t c = 0; c < classes; ++c) {
    double g = dlogits[c];
    result.grad_b.data[c] = g;
    double* gw = result.grad_w.row(c);
    const double* wc = w.row(c);
    for (std::size_t j = 0; j < k; ++j) {
      gw[j] = g * x[j];
      result.grad_x[j] += g * wc[j];
    }
  }
  return result;
}

std::vector<double> dropout_mask(std::size_t n, double p_drop, std::mt19937_64& rng) {
  if (p_drop < 0.0 || p_drop >= 1.0)
    throw std::invalid_argument("dropout: p_drop must be in [0, 1)");
  std::vector<double> mask(n, 1.0);
  if (p_drop == 0.0) return mask;
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  const double keep_scale = 1.0 / (1.0 - p_drop);
  for (double& m : mask) m = dist(rng) < p_drop ? 0.0 : keep_scale;
  return mask;
}

std::vector<double> dropout(const std::vector<double>& x, double p_drop, DropoutMode mode,
                            std::uint64_t seed) {
  if (mode == DropoutMode::Inference) return x;
  std::mt19937_64 rng(seed);
  std::vector<double> mask = dropout_mask(x.size(), p_drop, rng);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * mask[i];
  return out;
}

void sgd_step(ParamStore& params, const ParamStore& grads, double lr) {
  if (params.entries.size() != grads.entries.size())
    throw std::invalid_argument("sgd_step: parameter/gradient stores differ");
  for (std::size_t e = 0; e < params.entries.size(); ++e) {
    auto& param = params.entries[e];
    const auto& grad = grads.entries[e];
    if (param.name != grad.name || !param.value.same_shape(grad.value))
      throw std::invalid_argument("sgd_step: mismatched entry " + param.name);
    std::size_t begin = param.pad_row_frozen ? param.value.stride() : 0;
    for (std::size_t i = begin; i < param.value.data.size(); ++i) {
      double g = grad.value.data[i];
      if (!std::isfinite(g))
        throw std::runtime_error("non-finite gradient in parameter " + param.name);
      param.value.data[i] -= lr * g;
    }
  }
}

// --- gradient checking -------------------------------------------------------

GradCheckReport grad_check(ParamStore& params, const std::function<double()>& loss,
                           const ParamStore& analytic, double eps,
                           std::size_t coords_per_array, std::uint64_t seed) {
  if (eps < 1e-7 || eps > 1e-3)
    throw std::invalid_argument("grad_check: eps outside [1e-7, 1e-3]");
  std::mt19937_64 rng(seed);
  GradCheckReport report;

  for (std::size_t e = 0; e < params.entries.size(); ++e) {
    auto& param = params.entries[e];
    const Array& grad = analytic.entries[e].value;

    std::vector<std::size_t> coords(param.value.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (coords.size() > coords_per_array) {
      // partial Fisher-Yates: the first coords_per_array entries are a
      // uniform sample without replacement
      for (std::size_t i = 0; i < coords_per_array; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, coords.size() - 1);
        std::swap(coords[i], coords[pick(rng)]);
      }
      coords.resize(coords_per_array);
    }

    double worst = 0.0;
    for (std::size_t idx : coords) {
      double saved = param.value.data[idx];
      param.value.data[idx] = saved + eps;
      double loss_plus = loss();
      param.value.data[idx] = saved - eps;
      double loss_minus = loss();
      param.value.data[idx] = saved;

      double numeric = (loss_plus - loss_minus) / (2.0 * eps);
      double exact = grad.data[idx];
      double rel = std::abs(exact - numeric) /
                   std::max(1e-4, std::abs(exact) + std::abs(numeric));
      worst = std::max(worst, rel);
    }
    report.per_array.emplace_back(param.name, worst);
    report.max_rel_err = std::max(report.max_rel_err, worst);
  }
  return report;
}

// --- checkpoint container ----------------------------------------------------

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t hash = seed;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::uint64_t vocab_hash(const Checkpoint& ckpt) {
  std::uint64_t hash = 14695981039346656037ull;
  for (const auto& [name, symbols] : ckpt.vocabs) {
    hash = fnv1a(name, hash);
    hash = fnv1a("\x1e", hash);
    for (const auto& symbol : symbols) {
      hash = fnv1a(symbol, hash);
      hash = fnv1a("\x1f", hash);
    }
  }
  return hash;
}

namespace {

constexpr char kMagic[8] = {'S', 'C', 'I', 'R', 'E', 'L', 'K', '1'};

template <typename T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("truncated checkpoint");
  return value;
}

void write_string(std::ostream& out, std::string_view s) {
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
  auto len = read_pod<std::uint32_t>(in);
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw std::runtime_error("truncated checkpoint");
  return s;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(kMagic, sizeof(kMagic));
    write_pod<std::uint64_t>(out, fnv1a(ckpt.config_json));
    write_pod<std::uint64_t>(out, vocab_hash(ckpt));
    write_string(out, ckpt.config_json);

    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.vocabs.size()));
    for (const auto& [name, symbols] : ckpt.vocabs) {
      write_string(out, name);
      write_pod<std::uint64_t>(out, symbols.size());
      for (const auto& symbol : symbols) write_string(out, symbol);
    }

    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.params.entries.size()));
    for (const auto& entry : ckpt.params.entries) {
      write_string(out, entry.name);
      write_pod<std::uint8_t>(out, entry.pad_row_frozen ? 1 : 0);
      write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(entry.value.shape.size()));
      for (std::size_t d : entry.value.shape) write_pod<std::uint64_t>(out, d);
      out.write(reinterpret_cast<const char*>(entry.value.data.data()),
                static_cast<std::streamsize>(entry.value.data.size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);  // atomic publish
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("not a checkpoint file: " + path.string());

  auto stored_config_hash = read_pod<std::uint64_t>(in);
  auto stored_vocab_hash = read_pod<std::uint64_t>(in);

  Checkpoint ckpt;
  ckpt.config_json = read_string(in);

  auto n_vocabs = read_pod<std::uint32_t>(in);
  for (std::uint32_t v = 0; v < n_vocabs; ++v) {
    std::string name = read_string(in);
    auto n_symbols = read_pod<std::uint64_t>(in);
    std::vector<std::string> symbols;
    symbols.reserve(n_symbols);
    for (std::uint64_t s = 0; s < n_symbols; ++s) symbols.push_back(read_string(in));
    ckpt.vocabs.emplace_back(std::move(name), std::move(symbols));
  }

  auto n_arrays = read_pod<std::uint32_t>(in);
  for (std::uint32_t a = 0; a < n_arrays; ++a) {
    ParamStore::Entry entry;
    entry.name = read_string(in);
    entry.pad_row_frozen = read_pod<std::uint8_t>(in) != 0;
    auto ndim = read_pod<std::uint32_t>(in);
    std::size_t total = 1;
    for (std::uint32_t d = 0; d < ndim; ++d) {
      entry.value.shape.push_back(static_cast<std::size_t>(read_pod<std::uint64_t>(in)));
      total *= entry.value.shape.back();
    }
    entry.value.data.resize(total);
    in.read(reinterpret_cast<char*>(entry.value.data.data()),
            static_cast<std::streamsize>(total * sizeof(double)));
    if (!in) throw std::runtime_error("truncated checkpoint " + path.string());
    ckpt.params.entries.push_back(std::move(entry));
  }

  if (fnv1a(ckpt.config_json) != stored_config_hash || vocab_hash(ckpt) != stored_vocab_hash)
    throw std::runtime_error("checkpoint hash mismatch (corrupt file): " + path.string());
  return ckpt;
}

}  // namespace scirel::nn
