#ifndef CQC_MPS_HPP
#define CQC_MPS_HPP

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cqc/model.hpp"
#include "cqc/tensor.hpp"

namespace cqc {

// Matrix-product state stored in right canonical form: every site tensor
// {chi_l, 2, chi_r} satisfies sum_{s,r} B[l,s,r] B*[l',s,r] = delta_{ll'},
// and bond_singulars[j-1] holds the Schmidt values of bond j (between sites
// j and j+1, 1-based). Boundary bonds have extent 1; the state is normalized.
struct MpsState {
  std::vector<ComplexTensor> site_tensors;
  std::vector<std::vector<double>> bond_singulars;

  long n_sites() const { return static_cast<long>(site_tensors.size()); }
  long bond_dim(long bond) const {  // 1-based, 0 and N give 1
    if (bond <= 0 || bond >= n_sites()) return 1;
    return site_tensors[static_cast<size_t>(bond - 1)].extent(2);
  }
  long max_bond_dim() const;
};

MpsState product_mps(const std::vector<Eigen::Vector2cd>& site_amplitudes);
MpsState polarized_mps(long n_sites);  // |00...0>
MpsState random_mps(long n_sites, long chi, std::mt19937_64& rng);

// Restores right canonical form + Schmidt values from an arbitrary tensor
// chain; normalizes. Bond dimensions are trimmed at the given cutoff.
MpsState canonicalize(std::vector<ComplexTensor> tensors,
                      double cutoff = kSvdCutoff);

cxd overlap(const MpsState& a, const MpsState& b);  // <a|b>
cxd local_expectation(const MpsState& state, long site, const ComplexTensor& op);
double entropy_at_bond(const MpsState& state, long bond);  // von Neumann, ln
double half_chain_entropy(const MpsState& state);

// Applies one two-site gate at bond j in place; returns the normalized
// discarded weight. The state stays right canonical under unitary gates and
// is renormalized unconditionally.
double apply_two_site_gate(MpsState& state, long bond, const ComplexTensor& gate,
                           std::optional<long> max_chi, double cutoff);

struct TebdResult {
  MpsState state;
  double truncation_error = 0.0;  // accumulated discarded weight
};

TebdResult tebd_evolve(const MpsState& state, const TrotterStep& step,
                       std::optional<long> max_chi, double cutoff = kSvdCutoff);

cxd mpo_expectation(const MpsState& state, const std::vector<ComplexTensor>& mpo);

struct DmrgOptions {
  long max_sweeps = 500;
  double energy_tol = 1e-12;  // per-sweep energy change
};

struct DmrgResult {
  MpsState state;
  double energy;
  long sweeps;
};

DmrgResult dmrg_ground_state(const IsingParams& p, long chi,
                             const DmrgOptions& opts = {});

// Dense amplitudes; site 1 is the most significant bit.
Eigen::VectorXcd mps_to_statevector(const MpsState& state, long max_sites = 16);

// Binary container: "CQCMPS01", int64 N, per site {int64 chi_l, chi_r,
// complex<double> data}, per bond {int64 len, double data}.
void save_mps(const MpsState& state, const std::string& path);
MpsState load_mps(const std::string& path);

}  // namespace cqc

#endif
