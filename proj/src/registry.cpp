#include "cpair/registry.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <regex>

namespace cpair {

namespace {

FormField basis_form(const ModelPtr& m, int i) {
  const int idx[1] = {i};
  return FormField::constant(m, FormValue::basis(m->dim(), idx));
}

const std::vector<ExampleInfo>& registry() {
  static const std::vector<ExampleInfo> list = {
      {"darboux(k)", 0, 0, -1, "form", "box [-1,1]^(2k+1) with dz + sum x_i dy_i; k = 1, 2, ..."},
      {"torus-contact", 3, 1, -1, "single", "T3, alpha0 = dx0, alpha = cos(x0) dx1 + sin(x0) dx2"},
      {"heisenberg3", 3, 1, -1, "form", "Heisenberg group, invariant form e3* with d e3* = -e1* ^ e2*"},
      {"heisenberg6-pair", 6, 1, 1, "family", "h3 x h3, (alpha0, beta0, alpha, beta) = (e1*, f1*, e3*, f3*)"},
      {"t6-pair-compatible", 6, 1, 1, "family", "T3 x T3 torus contact forms, alpha0 = dx0, beta0 = dy0"},
      {"t6-pair-incompatible", 6, 1, 1, "family", "T3 x T3 torus contact forms, alpha0 = dx1, beta0 = dy0"},
      {"t2-pair-type00", 2, 0, 0, "pair", "T1 x T1, closed pair (dx0, dy0)"},
      {"darboux6-pair", 6, 1, 1, "pair", "darboux(1) x darboux(1) product contact pair"},
  };
  return list;
}

}  // namespace

std::vector<ExampleInfo> list_examples(const std::string& filter) {
  std::vector<ExampleInfo> out;
  for (const ExampleInfo& e : registry())
    if (filter.empty() || e.name.find(filter) != std::string::npos) out.push_back(e);
  return out;
}

FormField torus_contact_form(const ModelPtr& t3) { return FormField::parse(t3, 1, {"0", "cos(x0)", "sin(x0)"}); }

DeformationFamily heisenberg6_family() {
  const ModelPtr h = Model::heisenberg3();
  const ModelPtr m = Model::product("h3 x h3", h, h);
  return DeformationFamily::make(basis_form(m, 0), basis_form(m, 3), basis_form(m, 2), basis_form(m, 5), 1, 1);
}

DeformationFamily t6_family(bool compatible, int resolution, int coarse_resolution) {
  const ModelPtr t3 = Model::torus(3, resolution);
  const ModelPtr m = Model::product("T3 x T3", t3, t3, coarse_resolution);
  const FormField alpha = pullback_left(m, torus_contact_form(t3));
  const FormField beta = pullback_right(m, torus_contact_form(t3));
  return DeformationFamily::make(basis_form(m, compatible ? 0 : 1), basis_form(m, 3), alpha, beta, 1, 1);
}

Builtin resolve_builtin(const std::string& name) {
  Builtin b;
  std::smatch match;
  static const std::regex darboux_re(R"(darboux\((\d+)\))");
  if (std::regex_match(name, match, darboux_re)) {
    const int k = std::stoi(match[1]);
    if (k < 1 || k > 5) throw std::invalid_argument("darboux(k) needs 1 <= k <= 5");
    const DarbouxModel d = darboux_model(k, 8);
    b.info = registry()[0];
    b.info.name = name;
    b.info.dim = 2 * k + 1;
    b.info.k = k;
    b.model = d.model;
    b.form = d.alpha;
    return b;
  }
  const auto list = registry();
  const auto it = std::find_if(list.begin(), list.end(), [&](const ExampleInfo& e) { return e.name == name; });
  if (it == list.end()) throw std::invalid_argument(fmt::format("unknown builtin example '{}'", name));
  b.info = *it;

  if (name == "torus-contact") {
    b.model = Model::torus(3);
    b.single = std::make_pair(basis_form(b.model, 0), torus_contact_form(b.model));
    b.form = torus_contact_form(b.model);
  } else if (name == "heisenberg3") {
    b.model = Model::heisenberg3();
    b.form = basis_form(b.model, 2);
  } else if (name == "heisenberg6-pair" || name == "t6-pair-compatible" || name == "t6-pair-incompatible") {
    b.family = name == "heisenberg6-pair" ? heisenberg6_family() : t6_family(name == "t6-pair-compatible");
    b.model = b.family->model;
    b.pair = std::make_pair(b.family->alpha, b.family->beta);
  } else if (name == "t2-pair-type00") {
    const ModelPtr t1 = Model::torus(1);
    b.model = Model::product("T1 x T1", t1, t1, 32);
    b.pair = std::make_pair(basis_form(b.model, 0), basis_form(b.model, 1));
  } else if (name == "darboux6-pair") {
    const DarbouxModel d = darboux_model(1, 8);
    const ProductPair p = product_contact_pair(d.alpha, d.alpha, "darboux(1) x darboux(1)", 4);
    b.model = p.model;
    b.pair = std::make_pair(p.alpha, p.beta);
  }
  return b;
}

}  // namespace cpair
