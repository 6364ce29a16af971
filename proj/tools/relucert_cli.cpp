// Command-line front end: read networks, run reparameterization /
// certification / norms / family generation, emit JSON and CSV reports.
//
// Exit codes: 0 success, 1 usage error, 2 validation or I/O error,
// 3 certification failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relucert/families.hpp"
#include "relucert/io.hpp"
#include "relucert/norms.hpp"
#include "relucert/reparam.hpp"

namespace {

using namespace relucert;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open output file: " + path);
    out << text;
}

struct BoxOptions {
    double a = 0.0;
    double b = 1.0;
    std::string a_spec = "box"; // "box" or a points file
};

void add_box_options(CLI::App* cmd, BoxOptions& box) {
    cmd->add_option("--a", box.a, "box lower bound (default 0)");
    cmd->add_option("--b", box.b, "box upper bound (default 1)");
    cmd->add_option("--A", box.a_spec, "reference set: 'box' or a JSON points file (default box)");
}

BoxDomain make_box(const BoxOptions& opts, int dim) {
    if (opts.a_spec == "box") return BoxDomain::whole(opts.a, opts.b, dim);
    return BoxDomain::with_points(opts.a, opts.b, dim, read_points_string(slurp(opts.a_spec)));
}

JsonValue meta_json(const BoxDomain& box, std::uint64_t seed) {
    JsonValue meta = JsonValue::object();
    meta.set("box", box_to_json(box));
    meta.set("seed", JsonValue::integer(static_cast<long long>(seed)));
    return meta;
}

FamilyKind parse_family(const std::string& name) {
    if (name == "shrinking-slope") return FamilyKind::ShrinkingSlope;
    if (name == "staircase") return FamilyKind::Staircase;
    if (name == "spike") return FamilyKind::Spike;
    throw ValidationError("unknown family: " + name);
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    if (out.empty()) throw ValidationError("empty list");
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) throw ValidationError("empty list");
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"shallow ReLU network reparameterization and norm certification"};
    app.require_subcommand(1);
    // --h is the hidden-width option, so help lives on --help alone.
    app.set_help_flag("--help", "print help");

    std::string input, output;
    std::uint64_t seed = 0;
    int expect_d = 0;
    BoxOptions box_opts;

    auto* creparam = app.add_subcommand("reparam", "reparameterize a network");
    creparam->set_help_flag("--help", "print help");
    creparam->add_option("--input", input, "network JSON file")->required();
    creparam->add_option("--output", output, "output path (default stdout)");
    creparam->add_option("--d", expect_d, "expected input dimension (validated against the file)");
    creparam->add_option("--seed", seed, "sample seed for the equivalence check (default 0)");
    add_box_options(creparam, box_opts);

    auto* ccertify = app.add_subcommand("certify", "certify the norm inequalities");
    ccertify->set_help_flag("--help", "print help");
    ccertify->add_option("--input", input, "network JSON file")->required();
    ccertify->add_option("--output", output, "output path (default stdout)");
    ccertify->add_option("--d", expect_d, "expected input dimension (validated against the file)");
    ccertify->add_option("--seed", seed, "seed recorded in the metadata (default 0)");
    add_box_options(ccertify, box_opts);

    double gamma = 0.5, v_sup = 0.0, p = 2.0;
    int grid_n = 0;
    long samples = 0;
    bool with_chambers = false;
    auto* cnorms = app.add_subcommand("norms", "exact Lipschitz norm and optional estimators");
    cnorms->set_help_flag("--help", "print help");
    cnorms->add_option("--input", input, "network JSON file")->required();
    cnorms->add_option("--output", output, "output path (default stdout)");
    cnorms->add_option("--d", expect_d, "expected input dimension (validated against the file)");
    cnorms->add_option("--gamma", gamma, "Hoelder/Sobolev exponent (default 0.5)");
    auto* vopt_n = cnorms->add_option("--v", v_sup, "Hoelder sup restriction (default box upper bound)");
    cnorms->add_option("--p", p, "Sobolev integrability exponent (default 2)");
    cnorms->add_option("--grid", grid_n, "Hoelder grid points per axis (enables the estimate)");
    cnorms->add_option("--samples", samples, "Sobolev sample count (enables the estimate)");
    cnorms->add_option("--seed", seed, "Sobolev sampling seed (default 0)");
    cnorms->add_flag("--chambers", with_chambers, "include the enumerated chambers in the output");
    add_box_options(cnorms, box_opts);

    std::string family_name;
    int fam_n = 1, fam_d = 1, fam_h = 1;
    auto* cfamily = app.add_subcommand("family", "generate a counterexample-family network");
    cfamily->set_help_flag("--help", "print help");
    cfamily->add_option("--family", family_name, "shrinking-slope | staircase | spike")->required();
    cfamily->add_option("--n", fam_n, "family index (default 1)");
    cfamily->add_option("--d", fam_d, "input dimension (default 1)");
    cfamily->add_option("--h", fam_h, "hidden width (default 1)");
    cfamily->add_option("--gamma", gamma, "spike: Hoelder exponent (default 0.5)");
    cfamily->add_option("--p", p, "spike: Sobolev exponent (default 2)");
    cfamily->add_option("--output", output, "output path (default stdout)");
    add_box_options(cfamily, box_opts);

    std::string n_list_text = "1,4,16,64", exponents_text = "1";
    std::string csv_path;
    auto* creport = app.add_subcommand("report", "divergence table for a family");
    creport->set_help_flag("--help", "print help");
    creport->add_option("--family", family_name, "shrinking-slope | staircase | spike")->required();
    creport->add_option("--n-list", n_list_text, "comma-separated n values (default 1,4,16,64)");
    creport->add_option("--exponents", exponents_text, "comma-separated exponents (default 1)");
    creport->add_option("--d", fam_d, "input dimension (default 1)");
    creport->add_option("--h", fam_h, "hidden width (default 1)");
    creport->add_option("--gamma", gamma, "spike: Hoelder/Sobolev exponent (default 0.5)");
    auto* vopt_r = creport->add_option("--v", v_sup, "spike: Hoelder sup restriction (default box upper bound)");
    creport->add_option("--p", p, "spike: Sobolev exponent (default 2)");
    creport->add_option("--grid", grid_n, "spike: Hoelder grid (default 1001)");
    creport->add_option("--samples", samples, "spike: Sobolev samples (default 100000)");
    creport->add_option("--seed", seed, "spike: Sobolev seed (default 0)");
    creport->add_option("--output", output, "JSON output path (default stdout)");
    creport->add_option("--csv", csv_path, "CSV output path (optional)");
    add_box_options(creport, box_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        auto check_dim = [&](const ShallowNet& net) {
            if (expect_d > 0 && net.input_dim != expect_d)
                throw ValidationError("network dimension does not match --d");
        };
        if (creparam->parsed()) {
            ShallowNet net = read_network_string(slurp(input));
            check_dim(net);
            BoxDomain box = make_box(box_opts, net.input_dim);
            ReparamResult res = reparameterize(net, box);
            double dev = verify_equivalence(net, res.output, box, 1000, seed);
            JsonValue doc = JsonValue::object();
            doc.set("meta", meta_json(box, seed));
            doc.set("theta", net_to_json(res.output));
            doc.set("theta_flat", net_to_flat_json(res.output));
            JsonValue rr = reparam_result_to_json(res);
            rr.set("max_sampled_deviation", JsonValue::real(dev));
            doc.set("result", std::move(rr));
            spill(output, doc.dump() + "\n");
            return 0;
        }
        if (ccertify->parsed()) {
            ShallowNet net = read_network_string(slurp(input));
            check_dim(net);
            BoxDomain box = make_box(box_opts, net.input_dim);
            Certificate cert = certify(net, box);
            JsonValue doc = JsonValue::object();
            doc.set("meta", meta_json(box, seed));
            doc.set("certificate", certificate_to_json(cert));
            spill(output, doc.dump() + "\n");
            return cert.all_pass() ? 0 : 3;
        }
        if (cnorms->parsed()) {
            ShallowNet net = read_network_string(slurp(input));
            check_dim(net);
            BoxDomain box = make_box(box_opts, net.input_dim);
            NormReport rep = lipnorm(net, box);
            if (grid_n > 0)
                rep.holder =
                    holder_norm_estimate(net, box, gamma, vopt_n->count() ? v_sup : box.hi, grid_n);
            if (samples > 0)
                rep.sobolev = sobolev_slobodeckij_estimate(net, box, gamma, p, samples, seed);
            JsonValue doc = JsonValue::object();
            doc.set("meta", meta_json(box, seed));
            doc.set("norms", norm_report_to_json(rep));
            if (with_chambers) {
                BoxDomain whole = box;
                whole.reference.reset();
                JsonValue arr = JsonValue::array();
                for (const Chamber& ch : enumerate_chambers(net, whole))
                    arr.push(chamber_to_json(ch));
                doc.set("chambers", std::move(arr));
            }
            spill(output, doc.dump() + "\n");
            return 0;
        }
        if (cfamily->parsed()) {
            FamilySpec spec;
            spec.kind = parse_family(family_name);
            spec.n = fam_n;
            spec.d = fam_d;
            spec.h = fam_h;
            spec.a = box_opts.a;
            spec.b = box_opts.b;
            if (spec.kind == FamilyKind::Spike) {
                spec.gamma = gamma;
                spec.p = p;
                spec.q = select_spike_q(gamma, p, fam_d);
            }
            ShallowNet net = make_family(spec);
            JsonValue doc = net_to_json(net);
            if (spec.kind == FamilyKind::Spike) doc.set("q", JsonValue::real(spec.q));
            spill(output, doc.dump() + "\n");
            return 0;
        }
        if (creport->parsed()) {
            FamilyKind kind = parse_family(family_name);
            std::vector<int> ns = parse_int_list(n_list_text);
            std::vector<double> exps = parse_double_list(exponents_text);
            EstimatorConfig est;
            if (grid_n > 0) est.grid_n = grid_n;
            if (samples > 0) est.n_samples = samples;
            est.seed = seed;
            double v = vopt_r->count() ? v_sup : box_opts.b;
            auto rows = divergence_report(kind, ns, exps, gamma, v, p, est, fam_d, fam_h,
                                          box_opts.a, box_opts.b);
            JsonValue doc = JsonValue::object();
            JsonValue meta = meta_json(BoxDomain::whole(box_opts.a, box_opts.b, fam_d), est.seed);
            meta.set("family", JsonValue::str(family_name));
            meta.set("grid_n", JsonValue::integer(est.grid_n));
            meta.set("samples", JsonValue::integer(est.n_samples));
            doc.set("meta", std::move(meta));
            doc.set("rows", divergence_to_json(rows, exps));
            spill(output, doc.dump() + "\n");
            if (!csv_path.empty()) spill(csv_path, divergence_to_csv(rows, exps));
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) { return run(argc, argv); }
