#include "mdfrac/postproc.hpp"

#include "mdfrac/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace mdfrac {

namespace {

double cross(const Vec2& a, const Vec2& b)
{
    return a.x() * b.y() - a.y() * b.x();
}

// Parameter interval of {p0 + s * dir} inside a counter-clockwise triangle.
bool clip_to_triangle(const Mesh& mesh, int e, const Vec2& p0, const Vec2& dir, double& lo, double& hi)
{
    const double scale = mesh.diameter(e);
    for (int j = 0; j < 3; ++j) {
        const Vec2& a = mesh.vertex(e, j);
        const Vec2 edge = mesh.vertex(e, (j + 1) % 3) - a;
        const double num = cross(edge, p0 - a);
        const double den = cross(edge, dir);
        const double tol = 1e-13 * scale * edge.norm();
        if (std::abs(den) <= 1e-15 * edge.norm() * dir.norm()) {
            if (num < -tol) {
                return false;
            }
            continue;
        }
        // num + s * den >= 0
        const double s = -num / den;
        if (den > 0.0) {
            lo = std::max(lo, s);
        } else {
            hi = std::min(hi, s);
        }
    }
    return hi > lo;
}

}  // namespace

double average_across_fracture(const BulkField& field, const ApertureProfile& profile, const FractureFrame& frame,
                               double t, int n_quad)
{
    const ApertureSample ap = eval_aperture_at(profile, frame, t);
    const Mesh& mesh = field.space().mesh();
    const Vec2 p0 = frame.point(0.0, t);
    const Vec2& dir = frame.normal();
    const double a = -ap.d1;
    const double b = ap.d2;
    const double tol = 1e-12 * ap.d;

    struct Piece {
        double lo, hi;
        int element;
    };
    std::vector<Piece> pieces;
    std::vector<double> breaks{a, b};
    const Vec2 probe = frame.point(0.5 * (a + b), t);
    for (int e : field.locator().crossing_row(probe.y())) {
        double lo = a;
        double hi = b;
        if (clip_to_triangle(mesh, e, p0, dir, lo, hi) && hi - lo > tol) {
            pieces.push_back({lo, hi, e});
            breaks.push_back(lo);
            breaks.push_back(hi);
        }
    }
    std::sort(breaks.begin(), breaks.end());
    const LineRule rule = gauss_legendre(n_quad);
    double integral = 0.0;
    double covered = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double lo = breaks[i];
        const double hi = breaks[i + 1];
        if (hi - lo <= tol) {
            continue;
        }
        const double mid = 0.5 * (lo + hi);
        const Piece* owner = nullptr;
        for (const Piece& p : pieces) {
            if (p.lo <= mid && mid <= p.hi) {
                owner = &p;
                break;
            }
        }
        if (!owner) {
            std::ostringstream msg;
            msg << "fracture average: transversal segment at t = " << t << " leaves the mesh near eta = " << mid;
            throw MeshError(msg.str());
        }
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double eta = lo + rule.points[q] * (hi - lo);
            integral += rule.weights[q] * (hi - lo) * field.eval(owner->element, frame.point(eta, t));
        }
        covered += hi - lo;
    }
    if (std::abs(covered - ap.d) > 1e-9 * ap.d) {
        std::ostringstream msg;
        msg << "fracture average: transversal segment at t = " << t << " is not covered by the mesh";
        throw MeshError(msg.str());
    }
    return integral / ap.d;
}

GammaFunction fracture_average(const FullSolution& full, const ApertureProfile& profile, const FractureFrame& frame,
                               int n_quad)
{
    const BulkField field = full.pressure;
    field.locator();
    return [field, profile, frame, n_quad](double t) {
        return average_across_fracture(field, profile, frame, t, n_quad);
    };
}

double l2_error_gamma(const GammaFunction& a, const GammaFunction& b, const InterfaceGrid& grid, int order)
{
    const LineRule rule = line_rule(order);
    double sum = 0.0;
    for (const InterfaceElement& el : grid.elements) {
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            // Stay strictly inside the element so piecewise fields pick the right piece.
            const double t = el.t0 + rule.points[q] * el.length();
            const double diff = a(t) - b(t);
            sum += rule.weights[q] * el.length() * diff * diff;
        }
    }
    return std::sqrt(sum);
}

GammaFunction as_function(const InterfaceField& field)
{
    return [field](double t) { return field.eval(t); };
}

double l2_error_bulk(const BulkField& field, const ScalarField& exact, int extra_order)
{
    const BulkSpace& space = field.space();
    const Mesh& mesh = space.mesh();
    double sum = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const TriangleRule rule = triangle_rule(2 * space.degree(e) + extra_order);
        const Eigen::VectorXd c = field.coeffs().segment(space.offset(e), space.local_dofs(e));
        const double jac = 2.0 * mesh.area(e);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double v = space.eval_reference(e, rule.points[q]).values.dot(c);
            const double diff = v - exact(mesh.map_to_physical(e, rule.points[q]));
            sum += rule.weights[q] * jac * diff * diff;
        }
    }
    return std::sqrt(sum);
}

const ErrorRow* ErrorTable::find(double d0, ModelVariant variant) const
{
    for (const ErrorRow& r : rows) {
        if (r.d0 == d0 && r.variant == variant) {
            return &r;
        }
    }
    return nullptr;
}

bool ErrorTable::all_ok() const
{
    return std::all_of(rows.begin(), rows.end(), [](const ErrorRow& r) { return r.ok; });
}

void ErrorTable::write_csv(std::ostream& out) const
{
    char buf[256];
    out << "d0,variant,l2_error,bulk_dofs,iface_dofs,residual\n";
    for (const ErrorRow& r : rows) {
        if (r.ok) {
            std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%d,%d,%.17g\n", r.d0, to_string(r.variant), r.l2_error,
                          r.bulk_dofs, r.interface_dofs, r.residual);
        } else {
            std::snprintf(buf, sizeof buf, "%.17g,%s,nan,%d,%d,nan\n", r.d0, to_string(r.variant), r.bulk_dofs,
                          r.interface_dofs);
        }
        out << buf;
    }
}

ErrorTable aperture_sweep(const std::function<Problem(double)>& make_problem, const std::vector<ModelVariant>& variants,
                          const std::vector<double>& d0_list, const SweepOptions& options)
{
    auto log = [&](const std::string& msg) {
        if (options.log) {
            options.log(msg);
        }
    };
    ErrorTable table;
    for (double d0 : d0_list) {
        GammaFunction reference = options.exact_reference;
        std::string ref_failure;
        Problem problem;
        try {
            if (!(d0 > 0.0)) {
                throw std::invalid_argument("d0 must be positive");
            }
            problem = make_problem(d0);
            if (!reference) {
                const FullSolution full = run_full(problem, options.reference_run.value_or(options.run));
                std::ostringstream msg;
                msg << "d0=" << d0 << " reference: dofs=" << full.dofs << " method=" << to_string(full.report.method)
                    << " iterations=" << full.report.iterations << " residual=" << full.report.relative_residual;
                log(msg.str());
                if (options.on_full) {
                    options.on_full(d0, full);
                }
                reference = fracture_average(full, problem.profile, problem.frame, options.n_quad);
            }
        } catch (const std::exception& ex) {
            ref_failure = std::string("reference run failed: ") + ex.what();
            log("d0=" + std::to_string(d0) + " " + ref_failure);
        }
        for (ModelVariant v : variants) {
            ErrorRow row;
            row.d0 = d0;
            row.variant = v;
            if (!ref_failure.empty()) {
                row.ok = false;
                row.message = ref_failure;
                table.rows.push_back(row);
                continue;
            }
            try {
                const ReducedSolution sol = run_reduced(problem, v, options.run);
                for (const std::string& w : sol.warnings) {
                    log("warning: " + w);
                }
                row.l2_error = l2_error_gamma(as_function(sol.interface), reference, *sol.grid);
                row.bulk_dofs = sol.bulk_dofs;
                row.interface_dofs = sol.interface_dofs;
                row.residual = sol.report.relative_residual;
                row.wellposedness_lhs = sol.wellposedness.lhs;
                std::ostringstream msg;
                msg << std::setprecision(6) << "d0=" << d0 << " variant=" << to_string(v) << " error=" << row.l2_error
                    << " method=" << to_string(sol.report.method) << " residual=" << row.residual
                    << " wellposedness_lhs=" << row.wellposedness_lhs;
                log(msg.str());
                if (options.on_reduced) {
                    options.on_reduced(d0, sol);
                }
            } catch (const std::exception& ex) {
                row.ok = false;
                row.message = ex.what();
                log("d0=" + std::to_string(d0) + " variant=" + to_string(v) + " failed: " + ex.what());
            }
            table.rows.push_back(row);
        }
    }
    return table;
}

void write_bulk_field(std::ostream& out, const BulkField& field)
{
    const BulkSpace& space = field.space();
    const Mesh& mesh = space.mesh();
    out << std::setprecision(17);
    out << "# bulk field\n";
    out << "vertices " << mesh.vertices.size() << '\n';
    for (const Vec2& v : mesh.vertices) {
        out << v.x() << ' ' << v.y() << '\n';
    }
    out << "elements " << mesh.elements.size() << '\n';
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& el = mesh.elements[e];
        out << el[0] << ' ' << el[1] << ' ' << el[2] << ' ' << to_string(mesh.tags[e]) << ' ' << space.degree(e)
            << '\n';
    }
    out << "coefficients " << mesh.elements.size() << '\n';
    for (int e = 0; e < mesh.num_elements(); ++e) {
        for (int i = 0; i < space.local_dofs(e); ++i) {
            out << (i ? " " : "") << field.coeffs()(space.offset(e) + i);
        }
        out << '\n';
    }
    out << "samples " << mesh.elements.size() << '\n';
    for (int e = 0; e < mesh.num_elements(); ++e) {
        for (int j = 0; j < 3; ++j) {
            out << (j ? " " : "") << field.eval(e, mesh.vertex(e, j));
        }
        out << '\n';
    }
}

void write_interface_curve(std::ostream& out, const InterfaceField& field, int samples_per_element)
{
    out << std::setprecision(17);
    out << "# t value\n";
    const auto& els = field.space().grid().elements;
    for (int e = 0; e < static_cast<int>(els.size()); ++e) {
        for (int s = 0; s < samples_per_element; ++s) {
            const double t = els[e].t0 + els[e].length() * (s + 0.5) / samples_per_element;
            out << t << ' ' << field.eval(e, t) << '\n';
        }
    }
}

namespace {

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    body(out);
    if (!out) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

void expect_header(std::istream& in, const std::string& key, std::size_t& count)
{
    std::string word;
    if (!(in >> word >> count) || word != key) {
        throw std::runtime_error("field dump: expected '" + key + " <count>'");
    }
}

}  // namespace

void write_fields(const FullSolution& solution, const std::string& prefix)
{
    write_file(prefix + "_bulk.txt", [&](std::ostream& out) { write_bulk_field(out, solution.pressure); });
}

void write_fields(const ReducedSolution& solution, const std::string& prefix, int samples_per_element)
{
    write_file(prefix + "_bulk.txt", [&](std::ostream& out) { write_bulk_field(out, solution.bulk); });
    write_file(prefix + "_interface.txt",
               [&](std::ostream& out) { write_interface_curve(out, solution.interface, samples_per_element); });
}

BulkDump read_bulk_field(std::istream& in)
{
    BulkDump dump;
    std::string line;
    std::getline(in, line);
    std::size_t n = 0;
    expect_header(in, "vertices", n);
    dump.vertices.resize(n);
    for (auto& v : dump.vertices) {
        in >> v.x() >> v.y();
    }
    expect_header(in, "elements", n);
    dump.elements.resize(n);
    dump.tags.resize(n);
    dump.degrees.resize(n);
    for (std::size_t e = 0; e < n; ++e) {
        in >> dump.elements[e][0] >> dump.elements[e][1] >> dump.elements[e][2] >> dump.tags[e] >> dump.degrees[e];
    }
    expect_header(in, "coefficients", n);
    dump.coefficients.resize(n);
    for (std::size_t e = 0; e < n; ++e) {
        dump.coefficients[e].resize(triangle_dofs(dump.degrees[e]));
        for (double& c : dump.coefficients[e]) {
            in >> c;
        }
    }
    expect_header(in, "samples", n);
    dump.samples.resize(n);
    for (auto& s : dump.samples) {
        in >> s[0] >> s[1] >> s[2];
    }
    if (!in) {
        throw std::runtime_error("field dump: truncated file");
    }
    return dump;
}

std::vector<std::pair<double, double>> read_interface_curve(std::istream& in)
{
    std::vector<std::pair<double, double>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream ls(line);
        double t = 0.0;
        double v = 0.0;
        if (!(ls >> t >> v)) {
            throw std::runtime_error("interface curve: malformed line '" + line + "'");
        }
        out.emplace_back(t, v);
    }
    return out;
}

}  // namespace mdfrac
