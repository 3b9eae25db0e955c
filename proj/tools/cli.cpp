#include "cli.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "fvt/aca.hpp"
#include "fvt/io.hpp"
#include "fvt/problems.hpp"
#include "fvt/rom.hpp"

namespace fvt::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input;
  std::string family;
  std::string dims;
  std::size_t h = 16;
  std::string gram;
  std::size_t rank = 3;
  double rho = 0.5;
  std::size_t terms = 6;
  std::size_t iters = 10;
  std::size_t rook = 1;
  std::size_t aux = 3;
  std::string draw = "uniform";
  std::uint64_t seed = 0;
  std::string seeds;
  double tol = kDefaultTol;
  double early_stop = 0.0;
  std::size_t threads = 0;
  std::string out;
  std::string basis = "hat";
  std::string ranks;
  std::string model;
  std::string params;
  std::string format = "decimal";
  bool identity_gram = false;
};

template <typename T>
std::vector<T> parse_list(const std::string& s, const char* what) {
  std::vector<T> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) throw UsageError(std::string(what) + ": empty element in '" + s + "'");
    std::size_t used = 0;
    try {
      if constexpr (std::is_same_v<T, double>) {
        v.push_back(std::stod(tok, &used));
      } else {
        if (tok.front() == '-') throw std::invalid_argument("negative");
        v.push_back(static_cast<T>(std::stoull(tok, &used)));
      }
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": bad value '" + tok + "'");
    }
    if (used != tok.size()) throw UsageError(std::string(what) + ": bad value '" + tok + "'");
  }
  if (v.empty()) throw UsageError(std::string(what) + ": empty list");
  return v;
}

std::string join(const Shape& s, char sep = ',') {
  std::string r;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k) r += sep;
    r += std::to_string(s[k]);
  }
  return r;
}

std::string rank_tuple(const Rank& r) { return "(" + join(r) + ")"; }

std::size_t resolve_threads(const Options& o) {
  if (o.threads != 0) return o.threads;
  if (const char* env = std::getenv("FVT_THREADS")) {
    char* end = nullptr;
    const unsigned long long t = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && t > 0) return static_cast<std::size_t>(t);
  }
  return 1;
}

// A problem is either a synthetic family or an in-memory FVT tensor.
struct Problem {
  std::optional<FamilySpec> spec;
  std::shared_ptr<const BTensor> tensor;
  std::vector<Eigen::VectorXd> grids;

  Shape dims() const { return spec ? spec->dims : tensor->dims(); }
  EntryOracle oracle(std::size_t threads) const {
    return spec ? make_oracle(*spec, threads) : tensor_oracle(tensor, threads);
  }
  std::shared_ptr<const BTensor> full(std::size_t threads) const {
    if (tensor) return tensor;
    EntryOracle o = oracle(threads);
    return std::make_shared<const BTensor>(materialize(o));
  }
};

// "identity", "diagonal", "dense" (seeded, families only) or "KIND:FILE".
void apply_gram(const std::string& g, std::size_t h, FamilySpec* spec, std::optional<InnerProduct>& ip) {
  if (g.empty()) return;
  const auto colon = g.find(':');
  const std::string kind = g.substr(0, colon);
  if (colon == std::string::npos) {
    if (kind == "identity") {
      if (spec) spec->gram = GramKind::Identity;
      ip = InnerProduct::identity(h);
      return;
    }
    if (!spec) throw UsageError("--gram " + kind + " needs a file (" + kind + ":FILE) for file inputs");
    if (kind == "diagonal") {
      spec->gram = GramKind::Diagonal;
    } else if (kind == "dense") {
      if (spec->family == Family::GaussianBump) throw UsageError("gaussian_bump has no seeded dense Gram");
      spec->gram = GramKind::Dense;
    } else {
      throw UsageError("unknown --gram '" + g + "'");
    }
    return;
  }
  const std::string file = g.substr(colon + 1);
  if (file.empty()) throw UsageError("--gram " + kind + ": missing file name");
  if (kind != "diagonal" && kind != "dense") throw UsageError("unknown --gram kind '" + kind + "'");
  const Eigen::VectorXd v = read_numbers(file);
  if (kind == "diagonal") {
    if (static_cast<std::size_t>(v.size()) != h) {
      throw Error(ErrorCode::DimensionMismatch, "'" + file + "' holds " + std::to_string(v.size()) + " weights, h = " +
                                                    std::to_string(h));
    }
    ip = InnerProduct::diagonal(v);
  } else {
    if (static_cast<std::size_t>(v.size()) != h * h) {
      throw Error(ErrorCode::DimensionMismatch, "'" + file + "' must hold h*h values");
    }
    const auto n = static_cast<Eigen::Index>(h);
    ip = InnerProduct::dense(Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        v.data(), n, n));
  }
  if (spec) spec->ip = ip;
}

FamilySpec family_spec(const Options& o) {
  FamilySpec s;
  try {
    s.family = parse_family(o.family);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (s.family == Family::GaussianBump) s = default_bump_spec();
  if (!o.dims.empty()) s.dims = parse_list<std::size_t>(o.dims, "--dims");
  s.h = o.h;
  s.rank = o.rank;
  s.rho = o.rho;
  s.terms = o.terms;
  s.seed = o.seed;
  return s;
}

Problem load_problem(const Options& o, const CLI::App& sub) {
  const bool has_input = !o.input.empty();
  const bool has_family = !o.family.empty();
  if (has_input == has_family) throw UsageError("give exactly one of --input and --family");
  Problem p;
  std::optional<InnerProduct> ip;
  if (has_family) {
    FamilySpec s = family_spec(o);
    if (s.family == Family::GaussianBump && sub.count("--h") == 0) s.h = default_bump_spec().h;
    try {
      s.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    apply_gram(o.gram, s.h, &s, ip);
    p.grids = family_grids(s);
    p.spec = std::move(s);
    return p;
  }
  for (const char* flag : {"--dims", "--h", "--family-rank", "--rho", "--terms"}) {
    if (sub.count(flag) != 0) throw UsageError(std::string(flag) + " applies to --family only");
  }
  BTensor A = load_fvt(o.input);
  apply_gram(o.gram, A.dim(), nullptr, ip);
  if (ip) A = BTensor(A.dims(), *ip, std::move(A.coeffs()));
  for (auto n : A.dims()) p.grids.push_back(Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(n), 1.0, static_cast<double>(n)));
  p.tensor = std::make_shared<const BTensor>(std::move(A));
  return p;
}

AbcConfig abc_config(const Options& o, const Shape& dims) {
  AbcConfig c;
  c.n_iter = o.iters;
  c.n_rook = o.rook;
  c.aux_size = o.aux;
  c.seed = o.seed;
  c.tol_rel = o.tol;
  c.early_stop = o.early_stop;
  try {
    c.draw = parse_draw_rule(o.draw);
    c.validate(dims);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return c;
}

void require_out(const Options& o) {
  if (o.out.empty()) throw UsageError("--out is required");
}

json sets_json(const std::vector<IndexSet>& sets) {
  json a = json::array();
  for (const auto& s : sets) {
    json b = json::array();
    for (auto i : s) b.push_back(i + 1);
    a.push_back(b);
  }
  return a;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------

int cmd_gen(const Options& o, const CLI::App& sub, std::ostream& out) {
  if (o.family.empty()) throw UsageError("gen needs --family");
  require_out(o);
  const Problem p = load_problem(o, sub);
  const std::size_t threads = resolve_threads(o);
  auto A = p.full(threads);
  save_fvt(*A, o.out);
  out << "dims\th\tgram\tentries\n"
      << join(A->dims(), 'x') << '\t' << A->dim() << '\t' << static_cast<int>(A->ip().kind()) << '\t' << A->size()
      << '\n';
  return kExitOk;
}

int cmd_build(const Options& o, const CLI::App& sub, std::ostream& out) {
  require_out(o);
  const Problem p = load_problem(o, sub);
  const AbcConfig cfg = abc_config(o, p.dims());
  BasisKind basis{};
  try {
    basis = parse_basis_kind(o.basis);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const std::size_t threads = resolve_threads(o);
  CachedOracle oracle(p.oracle(threads), threads);
  AbcResult r = tucker_abc(oracle, cfg);
  if (r.model.core().size() == 0) throw Error(ErrorCode::EmptyIndexSet, "no iterations completed");

  RomModel rom = make_rom(std::move(r.model), ParamGrid{p.grids}, basis);
  save_rom(rom, o.out + ".json", o.out + ".core.fvt");

  const AbcReport& rep = r.report;
  json doc;
  doc["iterations"] = rep.iterations;
  doc["converged"] = rep.converged;
  doc["draw"] = std::string(to_string(cfg.draw));
  doc["seed"] = cfg.seed;
  doc["n_rook"] = cfg.n_rook;
  doc["index_sets"] = sets_json(rep.index_sets);
  doc["aux_sets"] = sets_json(rep.aux_sets);
  doc["ranks"] = rep.ranks;
  doc["index_sizes"] = rep.index_sizes;
  doc["evaluations"] = rep.evaluations;
  doc["leverage_evaluations"] = rep.leverage_evaluations;
  doc["max_residual"] = json::array();
  for (double v : rep.max_residual) doc["max_residual"].push_back(format_double(v));
  write_text(o.out + ".report.json", doc.dump(1) + "\n");

  out << "iterations\trank\tevaluations\tmax_residual\n";
  for (std::size_t i = 0; i < rep.ranks.size(); ++i) {
    out << (i + 1) << '\t' << rank_tuple(rep.ranks[i]) << '\t' << rep.evaluations[i] << '\t'
        << format_double(rep.max_residual[i]) << '\n';
  }
  return kExitOk;
}

int cmd_hosvd(const Options& o, const CLI::App& sub, std::ostream& out) {
  require_out(o);
  if (o.ranks.empty()) throw UsageError("hosvd needs --rank a,b,...");
  const Problem p = load_problem(o, sub);
  const Rank ranks = parse_list<std::size_t>(o.ranks, "--rank");
  if (ranks.size() != p.dims().size()) throw UsageError("--rank needs one entry per mode");
  const auto A = p.full(resolve_threads(o));
  const HosvdResult hr = hosvd(*A, ranks, o.tol);
  save_fvt(hr.decomp.core, o.out + ".core.fvt");

  json doc;
  doc["requested"] = hr.requested;
  doc["ranks"] = hr.ranks;
  doc["clamped"] = hr.clamped;
  doc["core"] = std::filesystem::path(o.out + ".core.fvt").filename().string();
  doc["factors"] = json::array();
  for (const auto& F : hr.decomp.factors) {
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> R = F;
    json data = json::array();
    for (Eigen::Index i = 0; i < R.size(); ++i) data.push_back(hexfloat(R.data()[i]));
    doc["factors"].push_back({{"rows", R.rows()}, {"cols", R.cols()}, {"data", data}});
  }
  write_text(o.out + ".json", doc.dump(1) + "\n");

  std::ostringstream sig;
  sig << "mode\tindex\tsigma\n";
  for (std::size_t k = 0; k < hr.sigma.size(); ++k) {
    for (Eigen::Index i = 0; i < hr.sigma[k].size(); ++i) {
      sig << (k + 1) << '\t' << (i + 1) << '\t' << format_double(hr.sigma[k](i)) << '\n';
    }
  }
  write_text(o.out + ".sigma.tsv", sig.str());

  const double nA = fro_norm(*A);
  const double err = fro_distance(*A, hr.decomp.assemble());
  out << "rank\thosvd\thosvd_bound\tclamped\n"
      << rank_tuple(hr.ranks) << '\t' << format_double(nA > 0 ? err / nA : err) << '\t'
      << format_double(nA > 0 ? hr.tail_bound() / nA : hr.tail_bound()) << '\t' << (hr.clamped ? 1 : 0) << '\n';
  return kExitOk;
}

int cmd_compare(const Options& o, const CLI::App& sub, std::ostream& out) {
  const Problem p = load_problem(o, sub);
  std::vector<std::uint64_t> seeds{o.seed};
  if (!o.seeds.empty()) seeds = parse_list<std::uint64_t>(o.seeds, "--seeds");
  const AbcConfig base = abc_config(o, p.dims());
  const std::size_t threads = resolve_threads(o);

  const auto A = p.full(threads);
  const double nA = fro_norm(*A);
  const double scale = nA > 0 ? 1.0 / nA : 1.0;
  const HosvdBasis basis = hosvd_basis(*A, o.tol);
  const InnerProduct id = InnerProduct::identity(A->dim());

  out << "iterations\trank\ttuckerabc\thosvd\thosvd_bound\tevaluations";
  if (o.identity_gram) out << "\ttuckerabc_identity_gram";
  out << "\tseed\n";
  for (auto seed : seeds) {
    AbcConfig cfg = base;
    cfg.seed = seed;
    CachedOracle oracle(p.oracle(threads), threads);
    auto row = [&](std::size_t it, const TuckerCrossModel& m) {
      const Rank r = tucker_rank(m.core(), o.tol);
      const double abc = fro_distance(*A, m.assemble()) * scale;
      const HosvdResult hr = hosvd(*A, basis, r);
      const double hos = fro_distance(*A, hr.decomp.assemble()) * scale;
      out << it << '\t' << rank_tuple(r) << '\t' << format_double(abc) << '\t' << format_double(hos) << '\t'
          << format_double(hr.tail_bound() * scale) << '\t' << oracle.count();
      if (o.identity_gram) {
        // Same samples, factors recomputed as if the entries were plain vectors.
        const BTensor core_id(m.core().dims(), id, m.core().coeffs());
        std::vector<BMatrix> slabs;
        for (std::size_t k = 0; k < A->order(); ++k) {
          const BMatrix s = row_matrix(*A, m.index_sets, k);
          slabs.emplace_back(s.rows(), s.cols(), id, s.coeffs());
        }
        TuckerDecomp alt{m.core(), cross_factors(core_id, slabs, o.tol)};
        out << '\t' << format_double(fro_distance(*A, alt.assemble()) * scale);
      }
      out << '\t' << seed << '\n';
    };
    tucker_abc(oracle, cfg, row);
  }
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.model.empty()) throw UsageError("eval needs --model");
  if (o.params.empty()) throw UsageError("eval needs --params a,b,...");
  if (o.format != "decimal" && o.format != "hex" && o.format != "raw") throw UsageError("--format must be decimal, hex or raw");
  if (o.format == "raw" && o.out.empty()) throw UsageError("--format raw needs --out");
  const std::vector<double> alpha = parse_list<double>(o.params, "--params");
  const RomModel rom = load_rom(o.model);
  if (alpha.size() != rom.order()) throw UsageError("--params needs " + std::to_string(rom.order()) + " values");
  const Encoding enc = encode(rom, alpha);
  if (enc.extrapolated) err << "warning: parameters outside the grid; Lagrange basis extrapolates\n";
  const HVec v = rom_eval(rom, alpha);

  if (o.format == "raw") {
    std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot open '" + o.out + "' for writing");
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const auto bits = std::bit_cast<std::uint64_t>(v(i));
      for (int b = 0; b < 8; ++b) f.put(static_cast<char>((bits >> (8 * b)) & 0xFF));
    }
    if (!f) throw Error(ErrorCode::IoError, "write failed for '" + o.out + "'");
    return kExitOk;
  }
  std::ostringstream text;
  for (Eigen::Index i = 0; i < v.size(); ++i) text << (o.format == "hex" ? hexfloat(v(i)) : format_double(v(i))) << '\n';
  if (o.out.empty()) {
    out << text.str();
  } else {
    write_text(o.out, text.str());
  }
  return kExitOk;
}

int cmd_info(const Options& o, std::ostream& out) {
  if (o.input.empty()) throw UsageError("info needs --input");
  std::ifstream f(o.input, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open '" + o.input + "'");
  char magic[4] = {};
  f.read(magic, 4);
  f.close();
  if (std::string(magic, 4) == "FVT1" || std::filesystem::path(o.input).extension() != ".json") {
    const FvtHeader hdr = load_fvt_header(o.input);
    static const char* kinds[] = {"identity", "diagonal", "dense"};
    const std::size_t n = num_entries(hdr.dims);
    const std::uintmax_t bytes = std::filesystem::file_size(o.input);
    out << "key\tvalue\n"
        << "format\tfvt\n"
        << "version\t" << hdr.version << '\n'
        << "order\t" << hdr.dims.size() << '\n'
        << "dims\t" << join(hdr.dims) << '\n'
        << "h\t" << hdr.h << '\n'
        << "gram\t" << kinds[static_cast<int>(hdr.gram_kind)] << '\n'
        << "entries\t" << n << '\n'
        << "bytes\t" << bytes << '\n';
    return kExitOk;
  }
  const RomModel rom = load_rom(o.input);
  out << "key\tvalue\n"
      << "format\trom\n"
      << "order\t" << rom.order() << '\n'
      << "dims\t" << join(rom.grid.dims()) << '\n'
      << "h\t" << rom.ip().dim() << '\n'
      << "core\t" << join(rom.cross.core().dims()) << '\n';
  for (std::size_t k = 0; k < rom.order(); ++k) out << "basis" << (k + 1) << '\t' << to_string(rom.bases[k]) << '\n';
  return kExitOk;
}

// Appends "--key value" for config keys not given on the command line.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  auto it = std::find(args.begin(), args.end(), "--config");
  std::string path;
  if (it != args.end()) {
    if (it + 1 == args.end()) throw UsageError("--config needs a file");
    path = *(it + 1);
    args.erase(it, it + 2);
  } else {
    for (auto a = args.begin(); a != args.end(); ++a) {
      if (a->rfind("--config=", 0) == 0) {
        path = a->substr(9);
        args.erase(a);
        break;
      }
    }
  }
  if (path.empty()) return args;
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "config '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw UsageError("config must be a JSON object");
  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  for (const auto& [key, val] : doc.items()) {
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    if (val.is_boolean()) {
      if (val.get<bool>()) args.push_back(flag);
      continue;
    }
    std::string text;
    if (val.is_array()) {
      for (std::size_t i = 0; i < val.size(); ++i) {
        if (i) text += ',';
        text += val[i].is_string() ? val[i].get<std::string>() : val[i].dump();
      }
    } else if (val.is_string()) {
      text = val.get<std::string>();
    } else if (val.is_number_float()) {
      text = format_double(val.get<double>());
    } else {
      text = val.dump();
    }
    args.push_back(flag);
    args.push_back(text);
  }
  return args;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Low-rank approximation of function-valued tensors", "fvt"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help and exit");
  app.set_version_flag("--version", "fvt 1.0.0");

  auto input_opts = [&](CLI::App* s, bool family) {
    s->add_option("--input", o.input, "FVT input file");
    if (!family) return;
    s->add_option("--family", o.family, "separable | gaussian_bump | lowrank_plus_decay");
    s->add_option("--dims", o.dims, "mode sizes a,b,c");
    s->add_option("--h", o.h, "dimension of H");
    s->add_option("--gram", o.gram, "identity | diagonal[:FILE] | dense[:FILE]");
    s->add_option("--family-rank", o.rank, "number of leading separable terms R");
    s->add_option("--rho", o.rho, "decay rate for lowrank_plus_decay");
    s->add_option("--terms", o.terms, "decaying terms for lowrank_plus_decay");
    s->add_option("--seed", o.seed, "random seed");
    s->add_option("--threads", o.threads, "concurrent oracle evaluations (default $FVT_THREADS or 1)");
    s->add_option("--tol", o.tol, "relative rank tolerance");
  };
  auto abc_opts = [&](CLI::App* s) {
    s->add_option("--iters", o.iters, "TuckerABC iterations");
    s->add_option("--rook", o.rook, "rook pivoting steps");
    s->add_option("--aux", o.aux, "initial auxiliary set size");
    s->add_option("--draw", o.draw, "uniform | roundrobin | leverage");
    s->add_option("--early-stop", o.early_stop, "stop when the residual falls below this fraction of the core");
  };

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic tensor");
  input_opts(gen, true);
  gen->add_option("--out", o.out, "output FVT file");

  CLI::App* build = app.add_subcommand("build", "run TuckerABC and save a reduced-order model");
  input_opts(build, true);
  abc_opts(build);
  build->add_option("--basis", o.basis, "hat | lagrange");
  build->add_option("--out", o.out, "output prefix");

  CLI::App* hos = app.add_subcommand("hosvd", "truncated HOSVD");
  input_opts(hos, true);
  hos->add_option("--rank", o.ranks, "Tucker rank a,b,c");
  hos->add_option("--out", o.out, "output prefix");

  CLI::App* cmp = app.add_subcommand("compare", "TuckerABC vs HOSVD error table");
  input_opts(cmp, true);
  abc_opts(cmp);
  cmp->add_option("--seeds", o.seeds, "list of seeds a,b,c (overrides --seed)");
  cmp->add_flag("--identity-gram", o.identity_gram, "add a column with factors computed under the identity Gram");

  CLI::App* ev = app.add_subcommand("eval", "evaluate a reduced-order model");
  ev->add_option("--model", o.model, "model JSON");
  ev->add_option("--params", o.params, "parameter values a,b,c");
  ev->add_option("--format", o.format, "decimal | hex | raw");
  ev->add_option("--out", o.out, "output file (required for raw)");

  CLI::App* info = app.add_subcommand("info", "summarize an FVT file or model JSON");
  info->add_option("--input", o.input, "file");

  try {
    const std::vector<std::string> args = merge_config(raw_args);
    std::vector<std::string> store{"fvt"};
    store.insert(store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : store) argv.push_back(s.data());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "fvt: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "fvt: " << e.what() << '\n';
    return kExitData;
  }

  try {
    if (*gen) return cmd_gen(o, *gen, out);
    if (*build) return cmd_build(o, *build, out);
    if (*hos) return cmd_hosvd(o, *hos, out);
    if (*cmp) return cmd_compare(o, *cmp, out);
    if (*ev) return cmd_eval(o, out, err);
    if (*info) return cmd_info(o, out);
  } catch (const UsageError& e) {
    err << "fvt: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "fvt: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace fvt::cli
