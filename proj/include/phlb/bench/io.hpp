#pragma once

#include "phlb/bench/sweep.hpp"
#include "phlb/labeling/labeling.hpp"
#include "phlb/source/source_space.hpp"
#include "phlb/spoc/spoc.hpp"
#include "phlb/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace phlb::io {

namespace fs = std::filesystem;

// Binary matrix file: "PHLB", then little-endian u32 version (1), rows, cols,
// then rows * cols little-endian IEEE-754 doubles in row-major order.
void write_matrix(const fs::path& path, const Matrix& m);
Matrix read_matrix(const fs::path& path);
void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);

// Sidecar "key: value" text, one pair per line, stored next to a matrix file
// as "<file>.meta". Keys are written in sorted order.
using Metadata = std::map<std::string, std::string>;
fs::path sidecar_path(const fs::path& matrix_path);
void write_metadata(const fs::path& path, const Metadata& meta);
Metadata read_metadata(const fs::path& path);

std::string join_labels(const std::vector<std::string>& labels);
std::vector<std::string> split_labels(const std::string& text);

void write_recording(const fs::path& path, const TimeSeriesMatrix& x, Metadata extra = {});
TimeSeriesMatrix read_recording(const fs::path& path);

void write_lead_field(const fs::path& path, const source::LeadField& a);
source::LeadField read_lead_field(const fs::path& path);

// Dataset as "<prefix>.epochs.phlb" (row e * N_c + c holds channel c of
// epoch e, L columns), its ".meta" sidecar, and "<prefix>.labels.csv" with
// columns epoch_index,label,good,start_sample.
void write_dataset(const fs::path& prefix, const labeling::LabeledDataset& ds);
labeling::LabeledDataset read_dataset(const fs::path& prefix);

// Long-format CSV "field,index,value" with rows for the eigenvalue, the band
// edges, and each entry of w and the pattern.
void write_model(const fs::path& path, const spoc::SpocModel& model);
spoc::SpocModel read_model(const fs::path& path);

inline constexpr const char* kResultsHeader = "config_id,n_epochs,xi,rel_power,fold,rho,alpha_rad,seed";

// One row per fold plus a summary row whose fold column is "mean".
std::string format_result_rows(const bench::SweepResult& r);
std::vector<bench::SweepResult> read_results(const fs::path& path);
std::vector<bench::SweepResult> parse_results(std::istream& in);

// Key = value text mirroring SweepConfig; unknown keys are rejected.
bench::SweepConfig parse_config(std::istream& in);
bench::SweepConfig read_config(const fs::path& path);
std::string format_config(const bench::SweepConfig& config);

std::string format_double(double v);

}  // namespace phlb::io
