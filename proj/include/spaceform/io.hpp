#pragma once

#include <string>
#include <vector>

#include "spaceform/classify.hpp"
#include "spaceform/data.hpp"
#include "spaceform/perceptron.hpp"
#include "spaceform/svm.hpp"

namespace spaceform {

// Shortest decimal form that parses back to the identical bits, so every
// file roundtrip is exact and byte-stable.
std::string format_double(double v);
double parse_double(const std::string& text);

struct DatasetFile {
  LabeledData data;
  std::vector<double> radii;  // optional: one per hyperbolic block
};

void save_dataset(const std::string& path, const LabeledData& data,
                  const std::vector<double>& radii = {});
DatasetFile load_dataset(const std::string& path);

void save_perceptron(const std::string& path, const PerceptronModel& model);
PerceptronModel load_perceptron(const std::string& path);

struct HyperbolicModelFile {
  SpaceForm form;
  HyperbolicPerceptron model;
};

void save_hyperbolic(const std::string& path, const SpaceForm& form,
                     const HyperbolicPerceptron& model);
HyperbolicModelFile load_hyperbolic(const std::string& path);

void save_svm_model(const std::string& path, const SvmModel& model);
SvmModel load_svm_model(const std::string& path);

void save_params(const std::string& path, const ClassifierParams& params);
ClassifierParams load_params(const std::string& path);

// Ordered key-value record emitter. Reports deliberately carry no clocks or
// environment state: identical inputs give identical bytes.
class Report {
 public:
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, const char* value);
  void add(const std::string& key, double value);
  void add(const std::string& key, long value);
  void add(const std::string& key, int value) { add(key, long(value)); }
  void add(const std::string& key, std::uint64_t value);

  const std::string& str() const { return body_; }
  void write(const std::string& path) const;

 private:
  std::string body_ = "spaceform-report 1\n";
};

}  // namespace spaceform
