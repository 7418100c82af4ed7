#include "zgkh/cli.hpp"

#include "zgkh/pieces.hpp"
#include "zgkh/tqft.hpp"
#include "zgkh/zigzag.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

namespace zgkh::cli {

namespace fs = std::filesystem;

// ------------------------------------------------------------------ cache

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw invariant_error("sha256 failed");
    std::ostringstream os;
    for (unsigned int k = 0; k < len; ++k) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[k]);
    return os.str();
}

ResultCache::ResultCache(std::string dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

std::string ResultCache::path(const std::string& key) const { return (fs::path(dir_) / (key + ".json")).string(); }

std::optional<std::string> ResultCache::get(const std::string& key) const {
    std::ifstream in(path(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void ResultCache::put(const std::string& key, const std::string& value) const {
    thread_local std::mt19937_64 rng{std::random_device{}()};
    fs::path tmp = fs::path(dir_) / (key + ".tmp." + std::to_string(rng()));
    {
        std::ofstream out(tmp, std::ios::binary);
        out << value;
        if (!out) throw invariant_error("cannot write cache file " + tmp.string());
    }
    fs::rename(tmp, path(key));
}

std::string resolve_cache_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    const char* env = std::getenv("ZGKH_CACHE_DIR");
    return env ? env : "";
}

// ------------------------------------------------------------------ pipeline

namespace {

struct Loaded {
    FreeComplex complex;
    std::string normalized;  // input identity for the cache key
    nlohmann::json meta;
};

// a path, or the JSON document itself when it starts with '{'
FreeComplex read_complex_file(const std::string& path) {
    nlohmann::json j;
    try {
        if (!path.empty() && path[0] == '{') {
            j = nlohmann::json::parse(path);
        } else {
            std::ifstream in(path);
            if (!in) throw parse_error("cannot open " + path);
            in >> j;
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(path + ": " + e.what());
    }
    FreeComplex c = complex_from_json(j);
    require_valid(c, "complex input");
    return c;
}

Loaded load(const JobSpec& job) {
    Loaded l;
    switch (job.input) {
    case JobSpec::Input::None: throw parse_error("no input given (use --pd, --braid, --rational or --complex)");
    case JobSpec::Input::Pd:
    case JobSpec::Input::Braid: {
        PDCode pd = job.input == JobSpec::Input::Pd ? parse_pd(job.source) : parse_braid(parse_braid_word(job.source));
        BasePoint bp = make_basepoint(pd, job.basepoint);
        l.complex = build_reduced_complex(pd, bp, CubeOptions{job.cap});
        // the crossingless unknot has no edge to mark
        nlohmann::json label = pd.size() == 0 ? nlohmann::json(nullptr) : nlohmann::json(pd.original[bp.edge]);
        l.normalized = "pd:" + pd.to_string() + "@" + label.dump();
        l.meta = {{"pd", pd.to_string()}, {"basepoint", label}, {"crossings", pd.size()}};
        break;
    }
    case JobSpec::Input::Rational: {
        Rational x = parse_rational(job.source);
        if (!x.positive() || x.p % 2 == 0)
            throw precondition_error("the closure of R(" + x.to_string() + ") is not a knot given by a zigzag complex");
        l.complex = closure(graph_to_complex(zz(x)));
        l.normalized = "rational:" + x.to_string();
        l.meta = {{"rational", x.to_string()}};
        break;
    }
    case JobSpec::Input::JsonComplex:
        l.complex = read_complex_file(job.source);
        l.normalized = "complex:" + to_json(l.complex).dump();
        l.meta = {{"complex_input", job.source.size() < 200 ? job.source : "inline"}};
        break;
    }
    return l;
}

nlohmann::json cmd_complex(const Loaded& l) {
    nlohmann::json r = l.meta;
    r["complex"] = to_json(l.complex);
    return r;
}

nlohmann::json cmd_decompose(const Loaded& l) {
    Decomposition d = decompose(l.complex);
    nlohmann::json r = l.meta;
    r["decomposition"] = to_json(d);
    r["verified"] = d.verify();
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& p : d.pieces) summary.push_back(describe(p));
    r["summary"] = summary;
    if (!d.verify()) throw invariant_error("decomposition failed to verify");
    return r;
}

nlohmann::json cmd_invariants(const Loaded& l) {
    const FreeComplex& c = l.complex;
    LambdaBounds lb = lambda_bounds(c);
    nlohmann::json r = l.meta;
    r["u_G"] = lb.u_g;
    r["u_G_mirror"] = lb.u_g_mirror;
    r["lambda"] = to_json(lb);
    r["s"] = {{"Q", s_invariant(c, 0)}, {"F2", s_invariant(c, 2)}, {"F3", s_invariant(c, 3)}};
    r["khovanov"] = to_json(specialized_homology(c, CoefficientSpec::integers_g_zero()));
    int rank = specialized_homology(c, CoefficientSpec::field_g_one(0)).total_dimension();
    r["g1_rank"] = rank;
    r["g1_check"] = rank == 1;
    return r;
}

nlohmann::json cmd_zigzag(const JobSpec& job) {
    if (job.args.size() != 1) throw parse_error("zigzag takes one rational argument");
    Rational x = parse_rational(job.args[0]);
    ZigzagGraph g = zz(x);
    nlohmann::json r{{"rational", x.to_string()}, {"emit", job.emit}};
    if (job.emit == "graph") {
        r["graph"] = to_json(g);
        r["ends_parity"] = {{"even_end", ends_parity(g).even_end},
                            {"odd_circle_end", ends_parity(g).odd_circle_end},
                            {"odd_dot_end", ends_parity(g).odd_dot_end}};
    } else if (job.emit == "complex") {
        r["complex"] = to_json(graph_to_complex(g));
    } else if (job.emit == "closure") {
        FreeComplex c = closure(graph_to_complex(g));
        r["closure"] = to_json(c);
        r["simplified"] = to_json(gaussian_eliminate(c));
    } else {
        throw parse_error("--emit must be graph, complex or closure");
    }
    return r;
}

nlohmann::json cmd_verify(const JobSpec& job) {
    std::string which = job.args.empty() ? "all" : job.args[0];
    nlohmann::json ids = nlohmann::json::array();
    bool ok = true;
    for (const auto& rep : verify_identity(which)) {
        ids.push_back(to_json(rep));
        ok = ok && rep.ok();
    }
    nlohmann::json parity_failures = nlohmann::json::array();
    int checked = 0;
    for (int p = 1; p <= 30; ++p)
        for (int q = 1; q <= 30; ++q) {
            if (std::gcd(p, q) != 1) continue;
            ++checked;
            ZigzagGraph g = zz(Rational(p, q));
            EndsParity e = ends_parity(g);
            bool good = !g.validate() && static_cast<int>(g.vertices.size()) == p + q &&
                        e.even_end == (p % 2 == 0 || q % 2 == 0) && e.odd_circle_end == (p % 2 == 1) &&
                        e.odd_dot_end == (q % 2 == 1);
            if (!good) parity_failures.push_back(Rational(p, q).to_string());
        }
    ok = ok && parity_failures.empty();
    nlohmann::json fg_failures = nlohmann::json::array();
    int fg_checked = 0;
    for (int p = 1; p < 20; p += 2)
        for (int q = 1; p + q <= 20; q += 2) {
            if (std::gcd(p, q) != 1) continue;
            ++fg_checked;
            if (!fg_certificate(Rational(p, q)).verify()) fg_failures.push_back(Rational(p, q).to_string());
        }
    ok = ok && fg_failures.empty();
    nlohmann::json r{{"identities", ids},
                     {"ends_parity", {{"checked", checked}, {"failures", parity_failures}}},
                     {"fg_certificates", {{"checked", fg_checked}, {"failures", fg_failures}}},
                     {"ok", ok}};
    return r;
}

nlohmann::json cmd_certify(const JobSpec& job) {
    if (job.args.size() != 2) throw parse_error("certify-rational takes two rationals");
    Rational x = parse_rational(job.args[0]), y = parse_rational(job.args[1]);
    RationalDistance d = lambda_distance_rational(x, y);
    nlohmann::json r = to_json(d);
    r["x"] = x.to_string();
    r["y"] = y.to_string();
    return r;
}

bool needs_input(const std::string& command) {
    return command == "complex" || command == "decompose" || command == "invariants";
}

nlohmann::json execute(const JobSpec& job, Loaded* loaded) {
    if (job.command == "complex") return cmd_complex(*loaded);
    if (job.command == "decompose") return cmd_decompose(*loaded);
    if (job.command == "invariants") return cmd_invariants(*loaded);
    if (job.command == "zigzag") return cmd_zigzag(job);
    if (job.command == "verify") return cmd_verify(job);
    if (job.command == "certify-rational") return cmd_certify(job);
    throw parse_error("unknown command '" + job.command + "'");
}

int exit_code_of(const Error& e) {
    switch (e.kind()) {
    case Error::Kind::Parse:
    case Error::Kind::Precondition: return 1;
    case Error::Kind::Cap: return 2;
    case Error::Kind::Invariant: return 3;
    }
    return 3;
}

}  // namespace

Outcome run(const JobSpec& job) {
    Outcome out;
    auto fail = [&](int code, const std::string& kind, const std::string& msg) {
        out.exit_code = code;
        out.report = {{"error", msg}, {"kind", kind}};
        out.text = "error: " + msg + "\n";
    };
    try {
        std::optional<Loaded> loaded;
        std::string key_material;
        if (needs_input(job.command)) {
            loaded = load(job);
            key_material = loaded->normalized;
        } else {
            key_material = job.emit + "|";
            for (const auto& a : job.args) key_material += a + "|";
        }
        std::string cache_dir = resolve_cache_dir(job.cache_dir);
        std::optional<ResultCache> cache;
        std::string key;
        if (!cache_dir.empty() && job.command != "verify") {
            cache.emplace(cache_dir);
            key = sha256_hex(std::string(kCodeVersion) + "\n" + job.command + "\n" + key_material);
            if (auto hit = cache->get(key)) {
                out.report = nlohmann::json::parse(*hit);
                out.cache_hit = true;
            }
        }
        if (!out.cache_hit) {
            out.report = execute(job, loaded ? &*loaded : nullptr);
            if (cache) cache->put(key, out.report.dump(2));
        }
        out.text = job.json ? out.report.dump(2) + "\n" : render_text(job.command, out.report);
        if (job.command == "verify" && !out.report.value("ok", false)) out.exit_code = 3;
    } catch (const Error& e) {
        const char* kinds[] = {"parse", "cap", "invariant", "precondition"};
        fail(exit_code_of(e), kinds[static_cast<int>(e.kind())], e.what());
    } catch (const nlohmann::json::exception& e) {
        fail(1, "parse", e.what());
    } catch (const std::exception& e) {
        fail(3, "internal", e.what());
    }
    if (job.json && out.exit_code != 0) out.text = out.report.dump(2) + "\n";
    return out;
}

// ------------------------------------------------------------------ text

namespace {

std::string homology_text(const nlohmann::json& groups) {
    std::ostringstream os;
    for (const auto& g : groups) {
        os << "  H(" << g["i"] << "," << g["q"] << ") = ";
        std::string sep;
        if (g.value("rank", 0) > 0) {
            os << "Z";
            if (g["rank"] != 1) os << "^" << g["rank"];
            sep = " + ";
        }
        for (const auto& t : g["torsion"]) os << sep << "Z/" << t.dump(), sep = " + ";
        if (sep.empty()) os << "0";
        os << "\n";
    }
    return os.str();
}

}  // namespace

std::string render_text(const std::string& command, const nlohmann::json& r) {
    std::ostringstream os;
    if (command == "complex") {
        os << render(complex_from_json(r["complex"]));
    } else if (command == "decompose") {
        for (const auto& s : r["summary"]) os << s.get<std::string>() << "\n";
        os << "verified: " << (r["verified"].get<bool>() ? "yes" : "no") << "\n";
    } else if (command == "invariants") {
        const auto& lam = r["lambda"];
        os << "u_G = " << r["u_G"] << ", u_G(mirror) = " << r["u_G_mirror"] << "\n";
        os << "lambda = [" << lam["lower"] << "," << (lam["upper"].is_null() ? "?" : lam["upper"].dump()) << "]";
        if (!lam["certificate"].is_null())
            os << " (certificate " << (lam["certificate"]["verified"].get<bool>() ? "verified" : "FAILED") << ")";
        os << "\n";
        os << "s_Q = " << r["s"]["Q"] << ", s_F2 = " << r["s"]["F2"] << ", s_F3 = " << r["s"]["F3"] << "\n";
        os << "G=1 homology rank " << r["g1_rank"] << (r["g1_check"].get<bool>() ? " (ok)" : " (expected 1)") << "\n";
        os << "reduced integral Khovanov homology:\n";
        os << homology_text(r["khovanov"]["table"]);
    } else if (command == "zigzag") {
        if (r.contains("graph")) {
            os << "zz(" << r["rational"].get<std::string>() << ") = " << r["graph"]["text"].get<std::string>() << "\n";
        } else if (r.contains("complex")) {
            const auto& c = r["complex"];
            for (std::size_t k = 0; k < c["objects"].size(); ++k) {
                const auto& o = c["objects"][k];
                os << "A_" << k << " = " << (o["object"] == "inf" ? "T_inf" : "T_0") << " at (" << o["i"] << ","
                   << o["q"] << ")\n";
            }
            for (std::size_t k = 0; k < c["differentials"].size(); ++k) {
                const auto& d = c["differentials"][k];
                os << "d_" << k + 1 << " = " << d["map"].get<std::string>() << ": A_" << d["from"] << " -> A_" << d["to"]
                   << "\n";
            }
        } else {
            os << render(complex_from_json(r["closure"])) << "simplified:\n"
               << render(complex_from_json(r["simplified"]));
        }
    } else if (command == "verify") {
        for (const auto& i : r["identities"])
            os << (i["invariants_agree"].get<bool>() ? "PASS " : "FAIL ") << i["name"].get<std::string>() << " "
               << i["params"].get<std::string>() << (i["witness_found"].get<bool>() ? " (witness)" : "") << "\n";
        os << (r["ends_parity"]["failures"].empty() ? "PASS " : "FAIL ") << "ends parity, "
           << r["ends_parity"]["checked"] << " rationals\n";
        os << (r["fg_certificates"]["failures"].empty() ? "PASS " : "FAIL ") << "fg certificates, "
           << r["fg_certificates"]["checked"] << " rationals\n";
    } else if (command == "certify-rational") {
        os << "lambda(R(" << r["x"].get<std::string>() << "), R(" << r["y"].get<std::string>()
           << ")) = " << r["distance"];
        if (r.contains("certificate"))
            os << " via (-1, " << r["normalized_pair"][1].get<std::string>() << "), certificate "
               << (r["certificate"]["verified"].get<bool>() ? "verified" : "FAILED");
        os << "\n";
    }
    return os.str();
}

// ------------------------------------------------------------------ batch

nlohmann::json batch(const nlohmann::json& manifest, const JobSpec& defaults, int jobs) {
    if (!manifest.is_array()) throw parse_error("a batch manifest is a JSON array of jobs");
    std::size_t n = manifest.size();
    std::vector<nlohmann::json> results(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next++) < n;) {
            const auto& entry = manifest[k];
            nlohmann::json res{{"index", k}};
            try {
                if (!entry.is_object()) throw parse_error("job is not an object");
                JobSpec job = defaults;
                job.json = true;
                job.command = entry.value("command", std::string("invariants"));
                job.args = entry.value("args", std::vector<std::string>{});
                job.emit = entry.value("emit", job.emit);
                job.basepoint = entry.value("basepoint", job.basepoint);
                job.input = JobSpec::Input::None;
                int inputs = 0;
                for (const auto& [field, kind] : {std::pair{"pd", JobSpec::Input::Pd},
                                                  std::pair{"braid", JobSpec::Input::Braid},
                                                  std::pair{"rational", JobSpec::Input::Rational},
                                                  std::pair{"complex", JobSpec::Input::JsonComplex}})
                    if (entry.contains(field)) {
                        ++inputs;
                        job.input = kind;
                        const auto& v = entry[field];
                        job.source = v.is_string() ? v.get<std::string>() : v.dump();
                    }
                if (inputs > 1) throw parse_error("job has more than one input");
                res["name"] = entry.value("name", std::string());
                res["command"] = job.command;
                Outcome o = run(job);
                res["exit_code"] = o.exit_code;
                res[o.exit_code == 0 ? "result" : "error"] = o.report;
            } catch (const std::exception& e) {
                res["exit_code"] = 1;
                res["error"] = {{"error", e.what()}, {"kind", "parse"}};
            }
            results[k] = std::move(res);
        }
    };
    int threads = std::max(1, std::min<int>(jobs, static_cast<int>(std::max<std::size_t>(n, 1))));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    nlohmann::json report = nlohmann::json::array();
    for (auto& r : results) report.push_back(std::move(r));
    return report;
}

// ------------------------------------------------------------------ main

namespace {

void add_input_options(CLI::App* sub, JobSpec& job, std::string& pd, std::string& braid, std::string& rational,
                       std::string& complex_file) {
    auto* o1 = sub->add_option("--pd", pd, "PD code, e.g. \"X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]\"");
    auto* o2 = sub->add_option("--braid", braid, "braid word, e.g. [1,1,1]");
    auto* o3 = sub->add_option("--rational", rational, "p/q with p odd: the closure of the rational tangle");
    auto* o4 = sub->add_option("--complex", complex_file, "FreeComplex JSON file");
    o1->excludes(o2, o3, o4);
    o2->excludes(o3, o4);
    o3->excludes(o4);
    sub->add_option("--basepoint", job.basepoint, "edge label carrying the base point");
    sub->add_option("--cap", job.cap, "live generator limit");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Z[G] Khovanov homology of knots and rational tangles", "zgkh"};
    app.require_subcommand(1);
    JobSpec job;
    std::string pd, braid, rational, complex_file, manifest;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    app.add_flag("--json", job.json, "print JSON instead of text");
    app.add_option("--cache", job.cache_dir, "cache directory (default: $ZGKH_CACHE_DIR)");

    std::vector<CLI::App*> with_input;
    for (const char* name : {"complex", "decompose", "invariants"}) {
        auto* sub = app.add_subcommand(name, std::string("run ") + name + " on a knot");
        add_input_options(sub, job, pd, braid, rational, complex_file);
        with_input.push_back(sub);
    }
    auto* zig = app.add_subcommand("zigzag", "zigzag graph, complex or closure of R(p/q)");
    zig->add_option("rational", job.args, "p/q > 0")->required()->expected(1);
    zig->add_option("--emit", job.emit, "graph | complex | closure")
        ->check(CLI::IsMember({"graph", "complex", "closure"}));
    auto* ver = app.add_subcommand("verify", "identity, parity and certificate suites");
    ver->add_option("identity", job.args, "identity name or all")->expected(0, 1);
    auto* cert = app.add_subcommand("certify-rational", "lambda distance of two rational tangles");
    cert->add_option("rationals", job.args, "x y")->required()->expected(2);
    auto* bat = app.add_subcommand("batch", "run a JSON manifest of jobs");
    bat->add_option("manifest", manifest, "manifest file")->required();
    bat->add_option("--jobs", jobs, "worker threads");
    for (auto* sub : {zig, ver, cert, bat}) {
        sub->add_flag("--json", job.json, "print JSON instead of text");
        sub->add_option("--cache", job.cache_dir, "cache directory");
    }
    for (auto* sub : with_input) {
        sub->add_flag("--json", job.json, "print JSON instead of text");
        sub->add_option("--cache", job.cache_dir, "cache directory");
    }
    // negative rationals such as -1 are positional values, not options
    std::vector<std::string> args;
    for (int k = argc - 1; k >= 1; --k) args.emplace_back(argv[k]);
    bool after_certify = false;
    for (auto it = args.rbegin(); it != args.rend(); ++it) {
        if (*it == "certify-rational") after_certify = true;
        else if (after_certify && it->size() > 1 && (*it)[0] == '-' && std::isdigit(static_cast<unsigned char>((*it)[1])))
            *it = " " + *it;
    }
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (!pd.empty()) job.input = JobSpec::Input::Pd, job.source = pd;
    if (!braid.empty()) job.input = JobSpec::Input::Braid, job.source = braid;
    if (!rational.empty()) job.input = JobSpec::Input::Rational, job.source = rational;
    if (!complex_file.empty()) job.input = JobSpec::Input::JsonComplex, job.source = complex_file;
    for (auto& a : job.args)
        if (!a.empty() && a[0] == ' ') a.erase(0, 1);

    if (bat->parsed()) {
        std::ifstream in(manifest);
        if (!in) {
            std::cerr << "error: cannot open " << manifest << "\n";
            return 1;
        }
        nlohmann::json m;
        try {
            in >> m;
            nlohmann::json report = batch(m, job, jobs);
            std::cout << report.dump(2) << "\n";
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
        return 0;
    }
    job.command = app.get_subcommands().front()->get_name();
    Outcome o = run(job);
    (o.exit_code == 0 ? std::cout : std::cerr) << o.text;
    return o.exit_code;
}

}  // namespace zgkh::cli
