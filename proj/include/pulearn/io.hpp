#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pulearn/model.hpp"

namespace pulearn {

/// Full-precision ("%.17g") decimal rendering.
std::string format_double(double v);

/// CSV with header `weight,x0..x{n-1},f0..f{D-1}`.
void write_sample(std::ostream& os, const ObservationSample& sample);
void write_sample_file(const std::string& path, const ObservationSample& sample);
ObservationSample read_sample(std::istream& is);
ObservationSample read_sample_file(const std::string& path);

struct ModelFile {
  Index d = 0;
  Index n = 0;
  Channel channel = Channel::gram;
  Matrix u;
  double fidelity = 0.0;
  bool converged = false;
  int iterations = 0;
  std::uint64_t seed = 0;
  std::vector<IterationRecord> history;
};

std::string model_to_json(const ModelFile& model);
ModelFile model_from_json(const std::string& text);
void write_model_file(const std::string& path, const ModelFile& model);
ModelFile read_model_file(const std::string& path);

/// {"u": [[...], ...]}; a ModelFile is accepted as well.
std::string matrix_to_json(const Matrix& u);
Matrix read_matrix_file(const std::string& path);

}  // namespace pulearn
