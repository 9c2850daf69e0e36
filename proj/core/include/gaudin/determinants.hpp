#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "gaudin/model.hpp"
#include "gaudin/rapidity.hpp"

namespace gaudin {

/// Determinant via LU with partial pivoting; 1 for the empty matrix.
/// Throws NonFinite when an entry is NaN or infinite.
double det(const Eigen::MatrixXd& m);
cplx det(const Eigen::MatrixXcd& m);

/// Matrix element together with the magnetization selection flag. A
/// mismatched pair is orthogonal, so `value` is exactly zero.
template <class Scalar>
struct MatrixElement {
  Scalar value{};
  bool sector_mismatch = false;
};

using Overlap = MatrixElement<double>;

// ---------------------------------------------------------------------------
// Domain-wall partition functions <eps_{i_1}..eps_{i_M} | lambda_1..lambda_M>
// ---------------------------------------------------------------------------

/// Det J with J_aa = sum_{c != a} 1/(eps_a - eps_c) - Lambda(eps_a) and
/// J_ab = 1/(eps_a - eps_b) over the occupied levels. Only the Lambda values
/// at the occupied levels enter, and the rapidities behind them need not
/// solve anything.
cplx partition_overlap_det(const GaudinModel& model, const BasisOccupation& occ,
                           std::span<const cplx> lambda_at_occ);
double partition_overlap_det(const GaudinModel& model, const BasisOccupation& occ,
                             std::span<const double> lambda_at_occ);

/// Sum over permutations P of prod_i 1/(lambda_i - eps_{P_i}). Throws
/// TooLarge above nine rapidities.
cplx partition_overlap_perm(const GaudinModel& model, const BasisOccupation& occ,
                            const RapiditySet& rap);

/// Izergin-type form: Cauchy-like prefactor times det[1/(eps_b - lambda_a)^2].
/// Throws CoincidingRapidities when two rapidities merge.
cplx izergin_overlap(const GaudinModel& model, const BasisOccupation& occ,
                     const RapiditySet& rap);

/// The same partition function written with the roles of the occupied
/// levels and the rapidities exchanged.
cplx partition_overlap_rapidity_det(const GaudinModel& model, const BasisOccupation& occ,
                                    const RapiditySet& rap);

// ---------------------------------------------------------------------------
// Scalar products and norms
// ---------------------------------------------------------------------------

/// <mu'|lambda> between a Mu-axis bra and a Lambda-axis ket, neither of which
/// has to be an eigenstate. A Lambda-axis bra is taken to be an eigenstate
/// and enters through Lambda^{mu'} = Lambda^{lambda'} - 2/g.
/// Returns value 0 with the mismatch flag when the sectors differ.
Overlap scalar_product_det(const GaudinModel& model, const LambdaState& bra,
                           const LambdaState& ket);

/// N_mu * N_lambda = Det G for the two representations of one state. Throws
/// AxisMismatch unless `lam` is Lambda-axis and `mu` Mu-axis.
double norm_product(const GaudinModel& model, const LambdaState& lam, const LambdaState& mu);

// ---------------------------------------------------------------------------
// Local spin form factors between unnormalized states
// ---------------------------------------------------------------------------

/// <mu'|S^+_i|lambda>: (N-1)x(N-1) determinant with row and column i
/// removed. The bra must hold one more up spin than the ket, otherwise the
/// element vanishes and the mismatch flag is set.
Overlap splus_form_factor(const GaudinModel& model, std::size_t site, const LambdaState& bra,
                          const LambdaState& ket);

/// <lambda|S^-_i|mu'> obtained from the S^+ element by conjugation.
Overlap sminus_form_factor(const GaudinModel& model, std::size_t site,
                           const LambdaState& bra_lambda, const LambdaState& ket_mu);

/// Coefficient multiplying the S^+ terms in the S^z expansion:
/// +1 selects 1/(lambda_j - eps_i), -1 selects 1/(eps_i - lambda_j).
/// Fixed to +1 by the one- and two-spin exact checks in the test suite.
inline constexpr int kSzCoefficientSign = +1;

/// <mu'|S^z_i|lambda> = -1/2 <mu'|lambda>
///                    + sum_j c_j <mu'|S^+_i|lambda without lambda_j>.
/// Needs the ket rapidities; throws RapiditiesRequired when `ket_rapidities`
/// is null and the ket has excitations. `coefficient_sign` exists so the
/// calibration check can evaluate the opposite convention.
Overlap sz_form_factor(const GaudinModel& model, std::size_t site, const LambdaState& bra,
                       const LambdaState& ket, const RapiditySet* ket_rapidities,
                       int coefficient_sign = kSzCoefficientSign);

/// Convenience overload extracting the ket rapidities from its Lambda values.
Overlap sz_form_factor(const GaudinModel& model, std::size_t site, const LambdaState& bra,
                       const LambdaState& ket);

enum class SpinOp { Plus, Minus, Z };

/// <mu|O|lambda> / <mu|lambda> for a state available in both
/// representations. S^+ and S^- vanish in a fixed-magnetization state.
/// Throws ZeroOverlap when |<mu|lambda>| is below 1e-12 of its natural scale.
double normalized_expectation(const GaudinModel& model, SpinOp op, std::size_t site,
                              const LambdaState& lam, const LambdaState& mu);

}  // namespace gaudin
