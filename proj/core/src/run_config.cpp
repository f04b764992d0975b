#include "robustagg/run_config.hpp"

#include "robustagg/marginals.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace robustagg {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw config_error("config: " + where + ": " + what);
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw config_error("malformed json in " + path + ": " + e.what());
  }
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw config_error(std::string("malformed json: ") + e.what());
  }
}

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) fail(where, "unknown key '" + it.key() + "'");
}

double get_num(const json& j, const std::string& where, const std::string& key) {
  if (!j.contains(key)) fail(where, "missing '" + key + "'");
  if (!j.at(key).is_number()) fail(where, "'" + key + "' must be a number");
  return j.at(key).get<double>();
}

Vector vector_from(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j.at(i).is_number()) fail(where, "expected numbers");
    v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
  }
  return v;
}

Matrix matrix_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
  auto rows = static_cast<Eigen::Index>(j.size());
  auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      fail(where, "ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

std::string type_of(const json& j, const std::string& where) {
  if (!j.contains("type") || !j.at("type").is_string()) fail(where, "missing 'type'");
  return j.at("type").get<std::string>();
}

MarginalSpec univariate_law_from(const json& j, const std::string& where) {
  std::string type = type_of(j, where);
  if (type == "uniform01") {
    check_keys(j, where, {"type"});
    return MarginalSpec::uniform01();
  }
  if (type == "normal") {
    check_keys(j, where, {"type", "mean", "sd"});
    return MarginalSpec::normal(get_num(j, where, "mean"), get_num(j, where, "sd"));
  }
  if (type == "lognormal_moments") {
    check_keys(j, where, {"type", "mean", "sd"});
    return MarginalSpec::lognormal_moments(get_num(j, where, "mean"), get_num(j, where, "sd"));
  }
  if (type == "empirical") {
    check_keys(j, where, {"type", "file", "samples"});
    std::vector<double> xs;
    if (j.contains("file"))
      xs = load_samples_file(j.at("file").get<std::string>());
    else if (j.contains("samples"))
      xs = j.at("samples").get<std::vector<double>>();
    else
      fail(where, "empirical law needs 'file' or 'samples'");
    std::sort(xs.begin(), xs.end());
    return MarginalSpec::empirical(std::move(xs));
  }
  fail(where, "unknown univariate law type '" + type + "'");
}

MarginalBlock block_from(const json& j, const std::string& where) {
  check_keys(j, where, {"indices", "law"});
  if (!j.contains("indices")) fail(where, "missing 'indices'");
  auto indices = j.at("indices").get<std::vector<int>>();
  if (!j.contains("law")) fail(where, "missing 'law'");
  const json& law = j.at("law");
  std::string type = type_of(law, where + ".law");
  if (type == "joint_normal") {
    check_keys(law, where + ".law", {"type", "mean", "cov"});
    if (!law.contains("mean") || !law.contains("cov")) fail(where, "joint_normal needs mean, cov");
    return MarginalBlock::joint_normal(indices, vector_from(law.at("mean"), where + ".mean"),
                                       matrix_from(law.at("cov"), where + ".cov"));
  }
  if (type == "empirical_joint") {
    check_keys(law, where + ".law", {"type", "points"});
    if (!law.contains("points")) fail(where, "empirical_joint needs points");
    return MarginalBlock::empirical_joint(indices,
                                          matrix_from(law.at("points"), where + ".points"));
  }
  if (type == "product") {
    check_keys(law, where + ".law", {"type", "laws"});
    if (!law.contains("laws") || !law.at("laws").is_array()) fail(where, "product needs 'laws'");
    std::vector<MarginalSpec> laws;
    for (const auto& lj : law.at("laws")) laws.push_back(univariate_law_from(lj, where + ".laws"));
    return MarginalBlock::product(indices, std::move(laws));
  }
  // univariate law directly on a one-coordinate block
  if (indices.size() != 1)
    fail(where, "law type '" + type + "' applies to a single coordinate; use 'product' or "
                "'joint_normal' for wider blocks");
  return MarginalBlock::product(indices, {univariate_law_from(law, where + ".law")});
}

Copula copula_from(const json& j, const std::string& where) {
  std::string type = type_of(j, where);
  if (type == "comonotone") {
    check_keys(j, where, {"type"});
    return Copula::comonotone();
  }
  if (type == "independence") {
    check_keys(j, where, {"type"});
    return Copula::independence();
  }
  if (type == "gaussian") {
    check_keys(j, where, {"type", "correlation"});
    if (!j.contains("correlation")) fail(where, "gaussian copula needs 'correlation'");
    return Copula::gaussian(matrix_from(j.at("correlation"), where + ".correlation"));
  }
  if (type == "student_t") {
    check_keys(j, where, {"type", "dof", "correlation"});
    if (!j.contains("correlation")) fail(where, "student_t copula needs 'correlation'");
    return Copula::student_t(get_num(j, where, "dof"),
                             matrix_from(j.at("correlation"), where + ".correlation"));
  }
  if (type == "explicit") {
    check_keys(j, where, {"type", "points"});
    if (!j.contains("points")) fail(where, "explicit copula needs 'points'");
    return Copula::explicit_joint(matrix_from(j.at("points"), where + ".points"));
  }
  fail(where, "unknown copula type '" + type + "'");
}

ObjectiveSpec objective_from(const json& j) {
  const std::string where = "objective";
  std::string type = type_of(j, where);
  ObjectiveSpec obj = ObjectiveSpec::max_coordinates();
  if (type == "max_coordinates") {
    check_keys(j, where, {"type", "sense"});
  } else if (type == "avar") {
    check_keys(j, where, {"type", "sense", "alpha"});
    obj = ObjectiveSpec::avar_integrand(get_num(j, where, "alpha"));
  } else if (type == "sum_squared_centered") {
    check_keys(j, where, {"type", "sense", "m"});
    obj = ObjectiveSpec::sum_squared_centered(j.value("m", 0.0));
  } else if (type == "max_affine") {
    check_keys(j, where, {"type", "sense", "pieces"});
    if (!j.contains("pieces") || !j.at("pieces").is_array() || j.at("pieces").empty())
      fail(where, "max_affine needs a non-empty 'pieces' array");
    std::vector<AffinePiece> pieces;
    for (const auto& pj : j.at("pieces")) {
      check_keys(pj, where + ".pieces", {"a", "b"});
      if (!pj.contains("a")) fail(where, "piece needs 'a'");
      pieces.push_back({vector_from(pj.at("a"), where + ".a"), pj.value("b", 0.0)});
    }
    obj = ObjectiveSpec::max_affine(std::move(pieces));
  } else {
    fail(where, "unknown objective type '" + type + "'");
  }
  std::string sense = j.value("sense", std::string("sup"));
  if (sense != "sup" && sense != "inf") fail(where, "sense must be 'sup' or 'inf'");
  return obj.with_sense(sense == "sup" ? ObjectiveSpec::Sense::Sup : ObjectiveSpec::Sense::Inf);
}

CostSpec cost_from(const json& j) {
  const std::string where = "cost";
  std::string type = type_of(j, where);
  if (type == "l1") {
    check_keys(j, where, {"type"});
    return CostSpec::l1();
  }
  if (type == "l2") {
    check_keys(j, where, {"type"});
    return CostSpec::l2_euclid();
  }
  if (type == "scaled_l1") {
    check_keys(j, where, {"type", "weights"});
    if (!j.contains("weights")) fail(where, "scaled_l1 needs 'weights'");
    return CostSpec::scaled_l1(vector_from(j.at("weights"), where + ".weights"));
  }
  if (type == "scaled") {
    check_keys(j, where, {"type", "factor", "inner"});
    if (!j.contains("inner")) fail(where, "scaled cost needs 'inner'");
    return CostSpec::scalar_multiple(cost_from(j.at("inner")), get_num(j, where, "factor"));
  }
  fail(where, "unknown cost type '" + type + "'");
}

AmbiguitySpec ambiguity_from(const json& j) {
  const std::string where = "ambiguity";
  std::string type = type_of(j, where);
  if (type == "ball") {
    check_keys(j, where, {"type", "rho"});
    return AmbiguitySpec::ball(get_num(j, where, "rho"));
  }
  if (type == "power") {
    check_keys(j, where, {"type", "r"});
    return AmbiguitySpec::power_penalty(get_num(j, where, "r"));
  }
  if (type == "linear") {
    check_keys(j, where, {"type"});
    return AmbiguitySpec::linear_penalty();
  }
  fail(where, "unknown ambiguity type '" + type + "'");
}

}  // namespace

RunConfig parse_run_config_string(const std::string& text) {
  json j = parse_json_text(text);
  check_keys(j, "top level",
             {"problem", "objective", "cost", "ambiguity", "penalty", "sampling", "train", "seed",
              "output_dir"});
  for (const char* req : {"problem", "objective", "ambiguity"})
    if (!j.contains(req)) fail("top level", std::string("missing '") + req + "'");

  // problem
  const json& pj = j.at("problem");
  check_keys(pj, "problem", {"dimension", "blocks", "copula"});
  if (!pj.contains("blocks") || !pj.at("blocks").is_array() || pj.at("blocks").empty())
    fail("problem", "missing non-empty 'blocks'");
  if (!pj.contains("copula")) fail("problem", "missing 'copula'");
  std::vector<MarginalBlock> blocks;
  for (std::size_t b = 0; b < pj.at("blocks").size(); ++b)
    blocks.push_back(block_from(pj.at("blocks").at(b), "problem.blocks[" + std::to_string(b) + "]"));
  Copula copula = copula_from(pj.at("copula"), "problem.copula");
  ReferenceMeasure reference(std::move(blocks), std::move(copula));
  if (pj.contains("dimension")) {
    auto dim = pj.at("dimension").get<int>();
    require(dim == reference.dim(), "config: problem.dimension does not match the blocks");
  }

  RunConfig rc{ProblemSpec{std::move(reference)}, SolveConfig{}, "out", ""};
  rc.problem.objective = objective_from(j.at("objective"));
  rc.problem.cost = j.contains("cost") ? cost_from(j.at("cost")) : CostSpec::l1();
  rc.problem.ambiguity = ambiguity_from(j.at("ambiguity"));

  if (j.contains("penalty")) {
    check_keys(j.at("penalty"), "penalty", {"gamma"});
    rc.problem.penalty = PenaltySpec(get_num(j.at("penalty"), "penalty", "gamma"));
  }

  if (j.contains("sampling")) {
    const json& sj = j.at("sampling");
    check_keys(sj, "sampling", {"theta", "epsilon"});
    std::string theta = sj.value("theta", std::string("half"));
    if (theta == "prod")
      rc.problem.sampling = SamplingMeasureSpec::prod();
    else if (theta == "half")
      rc.problem.sampling = SamplingMeasureSpec::half();
    else if (theta == "third") {
      Vector eps;
      if (sj.contains("epsilon") && !sj.at("epsilon").is_null()) {
        if (sj.at("epsilon").is_number())
          eps = Vector::Constant(rc.problem.reference.dim(), sj.at("epsilon").get<double>());
        else
          eps = vector_from(sj.at("epsilon"), "sampling.epsilon");
      }
      rc.problem.sampling = SamplingMeasureSpec::third(std::move(eps));
    } else {
      fail("sampling", "theta must be 'prod', 'half' or 'third'");
    }
  }

  SolveConfig& sc = rc.solve;
  if (j.contains("train")) {
    const json& tj = j.at("train");
    check_keys(tj, "train",
               {"N0", "N_fine", "batch", "lr", "lambda_lr", "lambda_warmup", "N_lambda",
                "aux_period", "aux_warmup", "lambda_init", "aux_init", "aux_lr", "n_eval",
                "n_diag", "n_dc", "ks_samples", "tail_window", "threads", "diagnostics"});
    sc.n_warm = tj.value("N0", sc.n_warm);
    sc.n_fine = tj.value("N_fine", sc.n_fine);
    sc.batch = tj.value("batch", sc.batch);
    sc.lr = tj.value("lr", sc.lr);
    sc.lambda_lr = tj.value("lambda_lr", sc.lambda_lr);
    sc.lambda_warmup = tj.value("lambda_warmup", sc.lambda_warmup);
    sc.lambda_period = tj.value("N_lambda", sc.lambda_period);
    sc.aux_period = tj.value("aux_period", sc.aux_period);
    sc.aux_warmup = tj.value("aux_warmup", sc.aux_warmup);
    sc.lambda_init = tj.value("lambda_init", sc.lambda_init);
    if (tj.contains("aux_init") && !tj.at("aux_init").is_null())
      sc.aux_init = tj.at("aux_init").get<double>();
    if (tj.contains("aux_lr") && !tj.at("aux_lr").is_null())
      sc.aux_lr = tj.at("aux_lr").get<double>();
    sc.n_eval = tj.value("n_eval", sc.n_eval);
    sc.n_diag = tj.value("n_diag", sc.n_diag);
    sc.n_dc = tj.value("n_dc", sc.n_dc);
    sc.ks_samples = tj.value("ks_samples", sc.ks_samples);
    sc.tail_window = tj.value("tail_window", sc.tail_window);
    sc.threads = tj.value("threads", sc.threads);
    sc.diagnostics = tj.value("diagnostics", sc.diagnostics);
  }
  sc.seed = j.value("seed", std::uint64_t{1});
  rc.output_dir = j.value("output_dir", std::string("out"));

  rc.problem.validate();
  sc.validate();

  // Emit the resolved document: the input with every default explicit.
  json out = j;
  out["cost"] = j.contains("cost") ? j.at("cost") : json{{"type", "l1"}};
  out["penalty"] = {{"gamma", rc.problem.penalty.gamma}};
  json sampling;
  switch (rc.problem.sampling.kind) {
    case SamplingMeasureSpec::Kind::Prod:
      sampling["theta"] = "prod";
      break;
    case SamplingMeasureSpec::Kind::Half:
      sampling["theta"] = "half";
      break;
    case SamplingMeasureSpec::Kind::Third: {
      sampling["theta"] = "third";
      Vector eps = resolve_epsilon(rc.problem.sampling, rc.problem.reference);
      sampling["epsilon"] = std::vector<double>(eps.data(), eps.data() + eps.size());
      rc.problem.sampling.epsilon = eps;
      break;
    }
  }
  out["sampling"] = sampling;
  json train;
  train["N0"] = sc.n_warm;
  train["N_fine"] = sc.n_fine;
  train["batch"] = sc.batch;
  train["lr"] = sc.lr;
  train["lambda_lr"] = sc.lambda_lr;
  train["lambda_warmup"] = sc.lambda_warmup;
  train["N_lambda"] = sc.lambda_period;
  train["aux_period"] = sc.aux_period;
  train["aux_warmup"] = sc.aux_warmup;
  train["lambda_init"] = sc.lambda_init;
  train["aux_init"] = sc.aux_init ? json(*sc.aux_init) : json(nullptr);
  train["aux_lr"] = sc.aux_lr > 0.0 ? json(sc.aux_lr) : json(nullptr);
  train["n_eval"] = sc.n_eval;
  train["n_diag"] = sc.n_diag;
  train["n_dc"] = sc.n_dc;
  train["ks_samples"] = sc.ks_samples;
  train["tail_window"] = sc.tail_window;
  train["threads"] = sc.threads;
  train["diagnostics"] = sc.diagnostics;
  out["train"] = train;
  out["seed"] = sc.seed;
  out["output_dir"] = rc.output_dir;
  out["problem"]["dimension"] = rc.problem.reference.dim();
  if (j.contains("objective") && !j.at("objective").contains("sense"))
    out["objective"]["sense"] = "sup";
  rc.resolved_json = out.dump(2);
  return rc;
}

RunConfig parse_run_config_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config_string(ss.str());
}

lp::DiscreteInstance parse_instance_string(const std::string& text) {
  json j = parse_json_text(text);
  check_keys(j, "instance", {"points", "pieces", "rho", "cost"});
  for (const char* req : {"points", "pieces", "rho"})
    if (!j.contains(req)) fail("instance", std::string("missing '") + req + "'");
  lp::DiscreteInstance inst;
  inst.points = matrix_from(j.at("points"), "instance.points");
  for (const auto& pj : j.at("pieces")) {
    check_keys(pj, "instance.pieces", {"a", "b"});
    if (!pj.contains("a")) fail("instance", "piece needs 'a'");
    inst.pieces.push_back({vector_from(pj.at("a"), "instance.a"), pj.value("b", 0.0)});
  }
  inst.rho = get_num(j, "instance", "rho");
  inst.cost = j.contains("cost") ? cost_from(j.at("cost")) : CostSpec::l1();
  inst.validate();
  return inst;
}

lp::DiscreteInstance parse_instance_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open instance: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance_string(ss.str());
}

}  // namespace robustagg
