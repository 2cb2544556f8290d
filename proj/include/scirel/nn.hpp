#ifndef SCIREL_NN_HPP
#define SCIREL_NN_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "scirel/embeddings.hpp"

namespace scirel::nn {

// Dense row-major f64 array.
struct Array {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  static Array zeros(std::vector<std::size_t> shape);
  static Array from_table(const embeddings::EmbeddingTable& table);

  std::size_t size() const { return data.size(); }
  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }
  double* row(std::size_t r) { return data.data() + r * stride(); }
  const double* row(std::size_t r) const { return data.data() + r * stride(); }
  std::size_t stride() const;  // product of shape[1:]
  bool same_shape(const Array& other) const { return shape == other.shape; }
};

// Named parameter arrays. `pad_row_frozen` marks embedding tables whose row 0
// (PAD) is excluded from gradient updates.
struct ParamStore {
  struct Entry {
    std::string name;
    Array value;
    bool pad_row_frozen = false;
  };
  std::vector<Entry> entries;

  Array& add(std::string name, Array value, bool pad_row_frozen = false);
  Array& get(std::string_view name);
  const Array& get(std::string_view name) const;
  bool has(std::string_view name) const;
  ParamStore zeros_like() const;
};

// --- layers ---------------------------------------------------------------

// Looks up each token's feature ids in the channel tables and concatenates
// the rows: output is n_tokens x D with D = sum of channel dims.
// ids is channel-major: ids[c][t].
Array embed_concat(const std::vector<const Array*>& tables,
                   const std::vector<std::vector<int>>& ids);
// Scatters the output gradient back into the channel table gradients.
void embed_concat_backward(const Array& grad_out,
                           const std::vector<std::vector<int>>& ids,
                           std::vector<Array*> table_grads);

// Valid 1-d convolution over token windows with ReLU:
// out[t][f] = max(0, bias[f] + sum_{i<h, j<D} in[t+i][j] * filt[f][i][j]).
// Requires n >= h (shorter inputs are PAD-padded upstream).
Array conv1d_relu(const Array& input, const Array& filters, const Array& bias);
struct ConvGrads {
  Array input;
  Array filters;
  Array bias;
};
ConvGrads conv1d_relu_backward(const Array& input, const Array& filters,
                               const Array& output, const Array& grad_out);

// Max over token positions per feature map; backward routes the gradient to
// the first maximal position of each map.
struct MaxPool {
  std::vector<double> values;
  std::vector<std::size_t> argmax;
};
MaxPool max_pool(const Array& maps);
Array max_pool_backward(const MaxPool& pooled, std::size_t n_positions,
                        const std::vector<double>& grad_out);

// Fully connected layer with stabilized softmax and cross-entropy loss.
struct DenseSoftmaxResult {
  std::vector<double> probs;
  double loss = 0.0;
  Array grad_w;
  Array grad_b;
  std::vector<double> grad_x;
};
DenseSoftmaxResult dense_softmax_xent(const std::vector<double>& x, const Array& w,
                                      const Array& b, int label);
std::vector<double> dense_softmax(const std::vector<double>& x, const Array& w,
                                  const Array& b);

// Inverted dropout: each mask entry is 0 with probability p_drop, else
// 1/(1 - p_drop). Apply by elementwise multiplication in both passes.
std::vector<double> dropout_mask(std::size_t n, double p_drop, std::mt19937_64& rng);

enum class DropoutMode { Train, Inference };
std::vector<double> dropout(const std::vector<double>& x, double p_drop,
                            DropoutMode mode, std::uint64_t seed);

// p <- p - lr * g, skipping PAD rows of frozen-row tables. Throws on
// non-finite gradients, naming the parameter.
void sgd_step(ParamStore& params, const ParamStore& grads, double lr);

// --- gradient checking ----------------------------------------------------

struct GradCheckReport {
  std::vector<std::pair<std::string, double>> per_array;  // max rel. error each
  double max_rel_err = 0.0;
};

// Central finite differences against analytic gradients over up to
// `coords_per_array` sampled coordinates per parameter array. `loss` must
// re-evaluate the deterministic loss at the current parameter values.
GradCheckReport grad_check(ParamStore& params, const std::function<double()>& loss,
                           const ParamStore& analytic, double eps,
                           std::size_t coords_per_array, std::uint64_t seed);

// --- checkpoint container ---------------------------------------------------

// Self-describing binary container: config JSON, vocab symbol lists, and the
// named parameter arrays, with FNV-1a hashes of the config and vocabs.
struct Checkpoint {
  std::string config_json;
  std::vector<std::pair<std::string, std::vector<std::string>>> vocabs;
  ParamStore params;
};

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 14695981039346656037ull);
std::uint64_t vocab_hash(const Checkpoint& ckpt);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace scirel::nn

#endif  // SCIREL_NN_HPP
