#pragma once

#include <string>
#include <vector>

#include "bef/io.hpp"

namespace bef::cli {

/// Log-linear mu_hat(r) against r, one series per profile. Entries clamped to
/// zero are drawn as hollow markers on the noise-floor line.
std::string mu_decay_svg(const std::vector<BoundaryProfile>& profiles);

/// kappa against the gap at n_max. Rows with kappa = +inf sit on the top edge.
std::string gap_kappa_svg(const std::vector<GapKappaRow>& rows);

/// S(rho_A) against n, one curve per (model, m).
std::string entropy_growth_svg(const std::vector<io::EntropyRecord>& records);

/// Reads runner JSON documents and writes the matching SVGs into `out_dir`.
/// Returns the written paths. Throws MissingInput when a file is absent or
/// nothing plottable was found.
std::vector<std::string> emit_plots(const std::vector<std::string>& json_files,
                                    const std::string& out_dir);

}  // namespace bef::cli
