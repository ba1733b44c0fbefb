#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "dicausal/model.hpp"
#include "dicausal/tape.hpp"
#include "dicausal/tensor.hpp"

namespace dicausal {

// Split of a representation Z (B x D) into causal and spurious parts by a
// pair of complementary soft masks:
//
//   M   = Z W + b
//   M_R = sigmoid(M),    M_I = sigmoid(-M)
//   Z_R = M_R * Z,       Z_I = M_I * Z
//
// so M_R + M_I = 1 and Z_R + Z_I = Z up to rounding.
struct DisentangledPair {
  Tensor z;
  Tensor mask_scores;
  Tensor causal_mask;
  Tensor spurious_mask;
  Tensor causal;
  Tensor spurious;
};

DisentangledPair disentangle(const Tensor& mask_weight, const Tensor& mask_bias, const Tensor& z);
DisentangledPair disentangle(const ModelParams& params, const Tensor& z);

struct DisentangledVars {
  VarId mask_scores;
  VarId causal_mask;
  VarId spurious_mask;
  VarId causal;
  VarId spurious;
};

DisentangledVars disentangle(Tape& tape, const BoundParams& bound, VarId z);

// CSV with header `domain,label,z0..z{D-1},zr0..zr{D-1},zi0..zi{D-1}` and one row per
// sample. Values are written in shortest round-trip form.
void export_representations(const DisentangledPair& pair, std::span<const int> labels, int domain_id,
                            const std::filesystem::path& path);

}  // namespace dicausal
