#include "mdfrac/config.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace mdfrac {

ConfigError::ConfigError(const std::string& what, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line)
{
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

double to_double(const std::string& key, const std::string& v, int line)
{
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw ConfigError("'" + key + "' expects a number, got '" + v + "'", line);
    }
    return out;
}

int to_int(const std::string& key, const std::string& v, int line)
{
    int out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw ConfigError("'" + key + "' expects an integer, got '" + v + "'", line);
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& v, int line)
{
    if (v == "true" || v == "yes" || v == "1") {
        return true;
    }
    if (v == "false" || v == "no" || v == "0") {
        return false;
    }
    throw ConfigError("'" + key + "' expects true or false, got '" + v + "'", line);
}

double positive(const std::string& key, double v, int line)
{
    if (!(v > 0.0)) {
        throw ConfigError("'" + key + "' must be positive", line);
    }
    return v;
}

EdgeTermForm to_edge_form(const std::string& key, const std::string& v, int line)
{
    if (v == "consistent") {
        return EdgeTermForm::consistent;
    }
    if (v == "printed") {
        return EdgeTermForm::printed;
    }
    throw ConfigError("'" + key + "' expects consistent or printed, got '" + v + "'", line);
}

using Handler = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value, int line)>;

const std::map<std::string, Handler>& handlers()
{
    static const std::map<std::string, Handler> table = {
        {"problem.preset",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             const auto names = preset_names();
             if (v != "custom" && std::find(names.begin(), names.end(), v) == names.end()) {
                 throw ConfigError("'" + k + "': unknown preset '" + v +
                                       "' (expected perp-asym, perp-sym, tangential, manufactured or custom)",
                                   line);
             }
             c.preset = v;
         }},
        {"problem.xi",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.xi = to_double(k, v, line);
             if (!(c.xi > 0.5)) {
                 throw ConfigError("'xi' must satisfy xi > 1/2, got " + v, line);
             }
         }},
        {"problem.g_gamma",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             if (v == "trace") {
                 c.g_gamma.reset();
             } else {
                 c.g_gamma = to_double(k, v, line);
             }
         }},
        {"custom.aperture",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             if (v != "sinusoidal" && v != "constant") {
                 throw ConfigError("'" + k + "' expects sinusoidal or constant, got '" + v + "'", line);
             }
             c.custom.aperture = v;
         }},
        {"custom.asymmetry",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             if (v == "antisymmetric") {
                 c.custom.asymmetry = Asymmetry::antisymmetric;
             } else if (v == "symmetric") {
                 c.custom.asymmetry = Asymmetry::symmetric;
             } else {
                 throw ConfigError("'" + k + "' expects antisymmetric or symmetric, got '" + v + "'", line);
             }
         }},
        {"custom.frequency",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.custom.frequency = to_double(k, v, line);
         }},
        {"custom.phase",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.custom.phase = to_double(k, v, line);
         }},
        {"custom.d1",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.custom.d1 = to_double(k, v, line);
         }},
        {"custom.d2",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.custom.d2 = to_double(k, v, line);
         }},
        {"custom.k_bulk",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.custom.k_bulk = positive(k, to_double(k, v, line), line);
         }},
        {"custom.k_fracture",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.custom.k_fracture = positive(k, to_double(k, v, line), line);
         }},
        {"custom.k_gamma",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.custom.k_gamma = positive(k, to_double(k, v, line), line);
         }},
        {"custom.k_perp",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.custom.k_perp = positive(k, to_double(k, v, line), line);
         }},
        {"custom.boundary",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             if (v != "affine" && v != "perp" && v != "tangential") {
                 throw ConfigError("'" + k + "' expects affine, perp or tangential, got '" + v + "'", line);
             }
             c.custom.boundary = v;
         }},
        {"custom.g_const",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.custom.g_const = to_double(k, v, line);
         }},
        {"custom.g_x1",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.custom.g_x1 = to_double(k, v, line);
         }},
        {"custom.g_x2",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.custom.g_x2 = to_double(k, v, line);
         }},
        {"sweep.variants",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.variants.clear();
             for (const std::string& name : split_list(v)) {
                 const auto var = parse_variant(name);
                 if (!var) {
                     throw ConfigError("'" + k + "': unknown variant '" + name +
                                           "' (expected full, I, I-R, II or II-R)",
                                       line);
                 }
                 c.variants.push_back(*var);
             }
             if (c.variants.empty()) {
                 throw ConfigError("'" + k + "' must list at least one variant", line);
             }
         }},
        {"sweep.d0",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.d0.clear();
             for (const std::string& item : split_list(v)) {
                 c.d0.push_back(positive(k, to_double(k, item, line), line));
             }
             if (c.d0.empty()) {
                 throw ConfigError("'" + k + "' must list at least one value", line);
             }
         }},
        {"sweep.reference",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             if (v == "full") {
                 c.reference_constant.reset();
             } else if (v.rfind("constant:", 0) == 0) {
                 c.reference_constant = to_double(k, trim(v.substr(9)), line);
             } else {
                 throw ConfigError("'" + k + "' expects full or constant:<value>, got '" + v + "'", line);
             }
         }},
        {"mesh.h",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.h = positive(k, to_double(k, v, line), line);
         }},
        {"mesh.reference_h",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.reference_h = positive(k, to_double(k, v, line), line);
         }},
        {"mesh.mode",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             if (v == "auto") {
                 c.mesh_mode.reset();
             } else if (v == "curved") {
                 c.mesh_mode = MeshMode::curved_reduced;
             } else if (v == "rectified") {
                 c.mesh_mode = MeshMode::rectified;
             } else {
                 throw ConfigError("'" + k + "' expects auto, curved or rectified, got '" + v + "'", line);
             }
         }},
        {"mesh.fracture_layers",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.fracture_layers = to_int(k, v, line);
             if (c.fracture_layers < 0) {
                 throw ConfigError("'" + k + "' must be nonnegative", line);
             }
         }},
        {"dg.degree",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.degree = to_int(k, v, line);
             if (c.degree < 1 || c.degree > 3) {
                 throw ConfigError("'" + k + "' must be 1, 2 or 3", line);
             }
         }},
        {"dg.interface_degree",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.interface_degree = to_int(k, v, line);
             if (c.interface_degree < 1 || c.interface_degree > 3) {
                 throw ConfigError("'" + k + "' must be 1, 2 or 3", line);
             }
         }},
        {"dg.mu0_bulk",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.mu0_bulk = positive(k, to_double(k, v, line), line);
         }},
        {"dg.mu0_gamma",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.mu0_gamma = positive(k, to_double(k, v, line), line);
         }},
        {"dg.gamma_edge_terms",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.gamma_edge_terms = to_edge_form(k, v, line);
         }},
        {"dg.transport_edge_terms",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.transport_edge_terms = to_edge_form(k, v, line);
         }},
        {"solver.method",
         [](ExperimentConfig& c, const std::string&, const std::string& v, int line) {
             try {
                 c.solver.method = parse_solve_method(v);
             } catch (const std::invalid_argument& ex) {
                 throw ConfigError(ex.what(), line);
             }
         }},
        {"solver.tol",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.solver.tol = to_double(k, v, line);
             if (!(c.solver.tol > 0.0 && c.solver.tol < 1.0)) {
                 throw ConfigError("'" + k + "' must lie in (0, 1)", line);
             }
         }},
        {"solver.max_iter",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.solver.max_iter = to_int(k, v, line);
             if (c.solver.max_iter < 1) {
                 throw ConfigError("'" + k + "' must be positive", line);
             }
         }},
        {"output.directory",
         [](ExperimentConfig& c, const std::string&, const std::string& v, int) { c.output_directory = v; }},
        {"output.csv", [](ExperimentConfig& c, const std::string&, const std::string& v, int) { c.csv_name = v; }},
        {"output.log", [](ExperimentConfig& c, const std::string&, const std::string& v, int) { c.log_name = v; }},
        {"output.dump_fields",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.dump_fields = to_bool(k, v, line);
         }},
        {"output.dump_matrices",
         [](ExperimentConfig& c, const std::string& k, const std::string& v, int line) {
             c.dump_matrices = to_bool(k, v, line);
         }},
    };
    return table;
}

// Cross-key checks that can only run once the whole file is read.
void validate(const ExperimentConfig& c)
{
    for (ModelVariant v : c.variants) {
        if (v == ModelVariant::full) {
            if (c.preset != "manufactured") {
                throw ConfigError("variant 'full' is only meaningful with the manufactured preset", 0);
            }
            continue;
        }
        if (c.preset == "manufactured") {
            throw ConfigError("the manufactured preset runs the full model only (variants = full)", 0);
        }
        if (c.mesh_mode && *c.mesh_mode != mesh_mode_of(v)) {
            throw ConfigError(std::string("variant ") + to_string(v) + " requires a " + to_string(mesh_mode_of(v)) +
                                  " mesh but mesh.mode = " + to_string(*c.mesh_mode),
                              0);
        }
    }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text)
{
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section = "problem";
    std::set<std::string> seen;
    const std::set<std::string> sections = {"problem", "custom", "sweep", "mesh", "dg", "solver", "output"};
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) {
            continue;
        }
        if (s.front() == '[') {
            if (s.back() != ']') {
                throw ConfigError("malformed section header '" + s + "'", line);
            }
            section = trim(s.substr(1, s.size() - 2));
            if (!sections.count(section)) {
                throw ConfigError("unknown section [" + section + "]", line);
            }
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected 'key = value', got '" + s + "'", line);
        }
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        const std::string full_key = section + "." + key;
        const auto it = handlers().find(full_key);
        if (it == handlers().end()) {
            throw ConfigError("unknown key '" + key + "' in section [" + section + "]", line);
        }
        if (!seen.insert(full_key).second) {
            throw ConfigError("duplicate key '" + key + "' in section [" + section + "]", line);
        }
        if (value.empty()) {
            throw ConfigError("key '" + key + "' has no value", line);
        }
        it->second(cfg, key, value, line);
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig parse_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'", 0);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

Problem make_problem(const ExperimentConfig& c, double d0)
{
    Problem p;
    if (c.preset != "custom") {
        p = make_preset(c.preset, d0, c.xi);
    } else {
        const CustomProblem& cp = c.custom;
        p.name = "custom";
        if (cp.aperture == "constant") {
            p.profile = ApertureProfile::constant(cp.d1, cp.d2);
        } else {
            SinusoidalParams sp;
            sp.d0 = d0;
            sp.frequency = cp.frequency;
            sp.phase = cp.phase;
            sp.asymmetry = cp.asymmetry;
            p.profile = ApertureProfile::sinusoidal(sp);
        }
        p.permeability = PermeabilityData::isotropic(cp.k_bulk, cp.k_fracture, c.xi);
        if (cp.k_gamma) {
            const double kg = *cp.k_gamma;
            p.permeability.k_gamma = [kg](double) { return kg; };
        }
        if (cp.k_perp) {
            const double kp = *cp.k_perp;
            p.permeability.k_perp = [kp](double) { return kp; };
        }
        if (cp.boundary == "perp") {
            p.g = [](const Vec2& x) { return 1.0 - x.x(); };
        } else if (cp.boundary == "tangential") {
            p.g = [](const Vec2& x) { return 4.0 * x.x() * (1.0 - x.x()) * (1.0 - x.y()); };
        } else {
            const double a = cp.g_const;
            const double b = cp.g_x1;
            const double e = cp.g_x2;
            p.g = [a, b, e](const Vec2& x) { return a + b * x.x() + e * x.y(); };
        }
        use_trace_of_g_on_gamma(p);
    }
    if (c.g_gamma) {
        const double gg = *c.g_gamma;
        p.g_gamma = [gg](double) { return gg; };
    }
    return p;
}

RunOptions run_options(const ExperimentConfig& c)
{
    RunOptions o;
    o.h = c.h;
    o.degree = c.degree;
    o.interface_degree = c.interface_degree;
    o.mu0_bulk = c.mu0_bulk;
    o.mu0_gamma = c.mu0_gamma;
    o.fracture_layers = c.fracture_layers;
    o.solver = c.solver;
    o.gamma_edge_terms = c.gamma_edge_terms;
    o.transport_edge_terms = c.transport_edge_terms;
    o.mesh_mode = c.mesh_mode;
    return o;
}

namespace {

std::string d0_tag(double d0)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", d0);
    return buf;
}

std::string file_variant_tag(ModelVariant v)
{
    std::string s = to_string(v);
    std::replace(s.begin(), s.end(), '-', '_');
    return s;
}

}  // namespace

int run_experiment(const ExperimentConfig& config, const RunFlags& flags, std::ostream& console)
{
    namespace fs = std::filesystem;
    const fs::path dir = flags.out_dir.value_or(config.output_directory);
    fs::create_directories(dir);
    std::ofstream log_file(dir / config.log_name);
    if (!log_file) {
        throw std::runtime_error("cannot open log file under '" + dir.string() + "'");
    }
    const auto start = std::chrono::steady_clock::now();
    auto log = [&](const std::string& msg) {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        log_file << '[' << std::fixed << std::setprecision(3) << secs << "s] " << msg << '\n';
        log_file.unsetf(std::ios::floatfield);
        if (flags.log_level != LogLevel::quiet) {
            console << msg << '\n';
        }
    };
    const bool dump_fields = flags.dump_fields || config.dump_fields;
    const bool dump_matrices = flags.dump_matrices || config.dump_matrices;
    const RunOptions opts = run_options(config);

    log("preset=" + config.preset + " variants=" + std::to_string(config.variants.size()) +
        " d0_values=" + std::to_string(config.d0.size()));

    ErrorTable table;
    if (config.preset == "manufactured") {
        for (double d0 : config.d0) {
            ErrorRow row;
            row.d0 = d0;
            row.variant = ModelVariant::full;
            try {
                const Problem p = make_problem(config, d0);
                const FullSolution sol = run_full(p, opts);
                row.l2_error = l2_error_bulk(sol.pressure, p.exact);
                row.bulk_dofs = sol.dofs;
                row.residual = sol.report.relative_residual;
                std::ostringstream msg;
                msg << "d0=" << d0 << " full: dofs=" << sol.dofs << " error=" << row.l2_error
                    << " method=" << to_string(sol.report.method) << " iterations=" << sol.report.iterations;
                log(msg.str());
                if (dump_fields) {
                    write_fields(sol, (dir / ("fields_d0_" + d0_tag(d0) + "_full")).string());
                }
            } catch (const std::exception& ex) {
                row.ok = false;
                row.message = ex.what();
                log("d0=" + d0_tag(d0) + " full failed: " + ex.what());
            }
            table.rows.push_back(row);
        }
    } else {
        SweepOptions so;
        so.run = opts;
        if (config.reference_h) {
            RunOptions ref = opts;
            ref.h = *config.reference_h;
            so.reference_run = ref;
        }
        if (config.reference_constant) {
            const double c = *config.reference_constant;
            so.exact_reference = [c](double) { return c; };
        }
        so.log = log;
        so.on_reduced = [&](double d0, const ReducedSolution& sol) {
            const std::string prefix = (dir / ("fields_d0_" + d0_tag(d0) + "_" + file_variant_tag(sol.variant))).string();
            if (dump_fields) {
                write_fields(sol, prefix);
            }
            if (dump_matrices) {
                const ReducedSetup setup = setup_reduced(make_problem(config, d0), sol.variant, opts);
                std::ofstream out(prefix + "_matrix.txt");
                write_matrix(out, setup.system);
            }
        };
        so.on_full = [&](double d0, const FullSolution& sol) {
            if (dump_fields) {
                write_fields(sol, (dir / ("fields_d0_" + d0_tag(d0) + "_reference")).string());
            }
        };
        table = aperture_sweep([&](double d0) { return make_problem(config, d0); }, config.variants, config.d0, so);
    }

    {
        std::ofstream csv(dir / config.csv_name);
        if (!csv) {
            throw std::runtime_error("cannot write the error table under '" + dir.string() + "'");
        }
        table.write_csv(csv);
    }
    int failed = 0;
    for (const ErrorRow& r : table.rows) {
        if (!r.ok) {
            ++failed;
            log(std::string("failed row d0=") + d0_tag(r.d0) + " variant=" + to_string(r.variant) + ": " + r.message);
        }
    }
    console << table.rows.size() << " rows, " << failed << " failed; table written to "
            << (dir / config.csv_name).string() << '\n';
    return failed == 0 ? 0 : 1;
}

}  // namespace mdfrac
