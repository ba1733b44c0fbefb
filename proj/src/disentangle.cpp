#include "dicausal/disentangle.hpp"

#include "dicausal/errors.hpp"
#include "dicausal/ops.hpp"
#include "dicausal/textio.hpp"

namespace dicausal {

DisentangledPair disentangle(const Tensor& mask_weight, const Tensor& mask_bias, const Tensor& z) {
  if (z.rank() != 2) throw DimensionError("disentangle: Z must be B x D, got " + shape_to_string(z.shape()));
  if (mask_weight.rank() != 2 || mask_weight.dim(0) != z.dim(1) || mask_weight.dim(1) != z.dim(1)) {
    throw DimensionError("disentangle: mask weight must be D x D with D = " + std::to_string(z.dim(1)) +
                         " (axis 1 of Z), got " + shape_to_string(mask_weight.shape()));
  }
  DisentangledPair pair;
  pair.z = z;
  pair.mask_scores = linear(z, mask_weight, mask_bias);
  pair.causal_mask = sigmoid(pair.mask_scores);
  pair.spurious_mask = sigmoid(negate(pair.mask_scores));
  pair.causal = elementwise(ElementwiseOp::mul, pair.causal_mask, z);
  pair.spurious = elementwise(ElementwiseOp::mul, pair.spurious_mask, z);
  return pair;
}

DisentangledPair disentangle(const ModelParams& params, const Tensor& z) {
  return disentangle(params.get(param_names::mask_weight), params.get(param_names::mask_bias), z);
}

DisentangledVars disentangle(Tape& tape, const BoundParams& bound, VarId z) {
  const std::size_t d = bound.params->config.feature_dim;
  const Tensor& zv = tape.value(z);
  if (zv.rank() != 2 || zv.dim(1) != d) {
    throw DimensionError("disentangle: axis 1 of Z must be " + std::to_string(d) + ", got " +
                         shape_to_string(zv.shape()));
  }
  DisentangledVars out{};
  out.mask_scores = tape.linear(z, bound[param_names::mask_weight], bound[param_names::mask_bias]);
  out.causal_mask = tape.sigmoid(out.mask_scores);
  out.spurious_mask = tape.sigmoid(tape.negate(out.mask_scores));
  out.causal = tape.mul(out.causal_mask, z);
  out.spurious = tape.mul(out.spurious_mask, z);
  return out;
}

void export_representations(const DisentangledPair& pair, std::span<const int> labels, int domain_id,
                            const std::filesystem::path& path) {
  const std::size_t rows = pair.z.rank() == 2 ? pair.z.dim(0) : 0;
  const std::size_t d = pair.z.rank() == 2 ? pair.z.dim(1) : 0;
  if (labels.size() != rows) {
    throw DimensionError("export_representations: " + std::to_string(rows) + " samples but " +
                         std::to_string(labels.size()) + " labels");
  }
  std::string out = "domain,label";
  for (std::size_t k = 0; k < d; ++k) out += ",z" + std::to_string(k);
  for (std::size_t k = 0; k < d; ++k) out += ",zr" + std::to_string(k);
  for (std::size_t k = 0; k < d; ++k) out += ",zi" + std::to_string(k);
  out += '\n';
  for (std::size_t b = 0; b < rows; ++b) {
    out += std::to_string(domain_id) + "," + std::to_string(labels[b]);
    for (double v : pair.z.row(b)) out += "," + textio::format_double(v);
    for (double v : pair.causal.row(b)) out += "," + textio::format_double(v);
    for (double v : pair.spurious.row(b)) out += "," + textio::format_double(v);
    out += '\n';
  }
  textio::write_file(path, out);
}

}  // namespace dicausal
