#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bobs/analysis.hpp"
#include "bobs/kernels.hpp"
#include "bobs/optimizer.hpp"

namespace bobs {

/// Header of a field file: field name, time (fs) and the s_opt used.
struct FieldHeader {
  std::string name;
  double t_fs = 0.0;
  double s_opt = 0.0;
};

/// Rows `x z value`, z-major.
void write_scalar_field(const std::filesystem::path& path, const FieldHeader& header,
                        const Field& f, const ElectronicGrid& grid);
/// Rows `x z jx jz`, z-major.
void write_vector_field(const std::filesystem::path& path, const FieldHeader& header,
                        const VectorField& j, const ElectronicGrid& grid);

struct SeriesRow {
  OptimizationResult opt;
  double sigma2 = 0.0;
  double mean_q = 0.0;
  double l2_per_point = 0.0;
};

/// Table `t delta_q2 sigma2 meanQ l2_per_point clamped`.
void write_series(const std::filesystem::path& path, const std::vector<SeriesRow>& rows);

/// Table `omega power`, header naming the source series.
void write_spectrum(const std::filesystem::path& path, const PowerSpectrum& spectrum);

}  // namespace bobs
