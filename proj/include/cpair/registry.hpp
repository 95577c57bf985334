#pragma once

// Named built-in examples.

#include "cpair/deformation.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cpair {

struct ExampleInfo {
  std::string name;
  int dim = 0;
  /// Type (k, l) for pairs and families; l < 0 for single forms (k is then the class power).
  int k = 0, l = -1;
  std::string kind;  // form | single | pair | family
  std::string summary;
};

/// Registry listing, optionally filtered by substring.
std::vector<ExampleInfo> list_examples(const std::string& filter = "");

struct Builtin {
  ExampleInfo info;
  ModelPtr model;
  std::optional<FormField> form;                           // class computation
  std::optional<std::pair<FormField, FormField>> single;   // (alpha0, alpha)
  std::optional<std::pair<FormField, FormField>> pair;     // (alpha, beta)
  std::optional<DeformationFamily> family;
};

/// Resolves a registry name such as "heisenberg6-pair" or "darboux(2)"; throws std::invalid_argument.
Builtin resolve_builtin(const std::string& name);

/// alpha = cos(x0) dx1 + sin(x0) dx2 on a 3-torus.
FormField torus_contact_form(const ModelPtr& t3);

/// (e1*, f1*, e3*, f3*) on h3 x h3.
DeformationFamily heisenberg6_family();
/// Torus contact forms on T3 x T3 with beta0 = dy0 and alpha0 = dx0 (compatible) or dx1.
DeformationFamily t6_family(bool compatible, int resolution = 32, int coarse_resolution = 8);

}  // namespace cpair
