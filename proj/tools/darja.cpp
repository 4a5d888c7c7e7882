// darja: train, evaluate, index and serve the Darja support assistant.

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "darja/app.hpp"
#include "darja/bench.hpp"
#include "darja/binary_io.hpp"
#include "darja/error.hpp"
#include "darja/service.hpp"
#include "darja/synth.hpp"
#include "darja/unicode.hpp"

namespace fs = std::filesystem;
using namespace darja;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

ChatService* g_service = nullptr;

void on_signal(int) {
    if (g_service) g_service->stop();
}

EngineConfig resolve_config(const std::string& path) {
    if (!path.empty()) return load_config(path);
    if (fs::exists("darja.conf")) return load_config("darja.conf");
    return EngineConfig{};
}

void print_reply(const BotReply& r) {
    std::cout << r.text << "\n  [" << to_string(r.route.path) << " " << r.route.confidence;
    if (r.intent) std::cout << " " << *r.intent;
    for (const auto& s : r.sources) std::cout << " " << s;
    std::cout << "]\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid Darja customer-support assistant"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    bool verbose = false;
    app.add_option("-c,--config", config_path, "key = value config file (default ./darja.conf when present)");
    app.add_flag("-v,--verbose", verbose, "debug logging");

    // synth
    auto* synth = app.add_subcommand("synth", "write the seeded synthetic intent corpus");
    SynthOptions synth_opts;
    std::string synth_out = "data/synth/corpus.tsv";
    synth->add_option("-o,--out", synth_out, "output TSV");
    synth->add_option("--seed", synth_opts.seed);
    synth->add_option("--per-intent", synth_opts.per_intent)->check(CLI::PositiveNumber);

    // train
    auto* train = app.add_subcommand("train", "balance, split, fit TF-IDF + LR (and MLP), report test metrics");
    std::string dataset, models_dir, report_path;
    bool with_mlp = false;
    std::optional<std::uint64_t> train_seed;
    train->add_option("-d,--dataset", dataset, "intent<TAB>text file (default train.dataset)");
    train->add_option("-m,--models", models_dir, "output directory (default models.dir)");
    train->add_option("--report", report_path, "metrics report path (default <models>/report.txt)");
    train->add_option("--seed", train_seed);
    train->add_flag("--mlp", with_mlp, "also train the MLP head");

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate the trained model on a labeled file");
    std::string eval_dataset;
    eval->add_option("-d,--dataset", eval_dataset, "intent<TAB>text file (default train.dataset)");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "chunk and index knowledge documents into index.dir");
    std::vector<std::string> ingest_paths;
    ingest->add_option("paths", ingest_paths, "files or directories (default knowledge.docs)");

    // serve
    auto* serve = app.add_subcommand("serve", "run the HTTP service");
    std::string host;
    int port = -1;
    serve->add_option("--host", host);
    serve->add_option("-p,--port", port)->check(CLI::Range(0, 65535));

    // chat
    auto* chat = app.add_subcommand("chat", "interactive session on stdin");
    std::string session_id = "cli";
    chat->add_option("-s,--session", session_id);

    // bench
    auto* bench = app.add_subcommand("bench", "per-stage latency percentiles for both paths");
    std::size_t bench_n = 1000, bench_rag_n = 20;
    int delay_ms = -1;
    std::string bench_out;
    bench->add_option("-n", bench_n, "deterministic-path turns");
    bench->add_option("--rag-n", bench_rag_n, "knowledge-path turns");
    bench->add_option("--delay-ms", delay_ms, "mock generation delay");
    bench->add_option("-o,--out", bench_out, "also write the report here");

    // normalize
    auto* norm = app.add_subcommand("normalize", "normalize arguments, an input file, or stdin lines");
    std::vector<std::string> norm_texts;
    std::string norm_in, norm_out;
    norm->add_option("text", norm_texts);
    norm->add_option("--in", norm_in, "one utterance per line");
    norm->add_option("--out", norm_out, "script<TAB>text lines (default stdout)");

    // stats
    auto* stats = app.add_subcommand("stats", "per-intent counts of a labeled file");
    std::string stats_dataset;
    stats->add_option("-d,--dataset", stats_dataset, "intent<TAB>text file (default train.dataset)");

    // config
    auto* config_cmd = app.add_subcommand("config", "print the effective configuration");
    bool check_paths = false;
    config_cmd->add_flag("--check", check_paths, "also require referenced files to exist");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);
    spdlog::set_pattern("%^%l%$ %v");

    try {
        auto config = resolve_config(config_path);

        if (*synth) {
            const auto ds = synthesize_corpus(synth_opts);
            save_dataset(ds, synth_out);
            std::cout << "wrote " << ds.size() << " utterances over " << synthetic_intents().size() << " intents to "
                      << synth_out << "\n";
        } else if (*train) {
            if (!dataset.empty()) config.train_dataset = dataset;
            if (!models_dir.empty()) config.models_dir = models_dir;
            if (train_seed) config.train.seed = *train_seed;
            if (with_mlp) config.train.with_mlp = true;
            validate_config(config, false);
            const auto ds = load_dataset(config.train_dataset, Script::Latin);
            const auto lexicon = config.lexicon.empty() ? SynonymLexicon{} : SynonymLexicon::load(config.lexicon);
            const auto result = train_pipeline(ds, lexicon, config.train);
            result.model.save(config.models_dir);
            if (report_path.empty()) report_path = config.models_dir + "/report.txt";
            const auto text = result.report.render();
            io::write_file_atomic(report_path, text);
            std::cout << text << "model written to " << config.models_dir << ", report to " << report_path << "\n";
        } else if (*eval) {
            if (!eval_dataset.empty()) config.train_dataset = eval_dataset;
            const auto model = NluModel::load(config.models_dir);
            const auto ds = load_dataset(config.train_dataset, Script::Latin);
            for (const auto& ex : ds.examples)
                if (!model.labels.contains(ex.intent)) throw DataError("intent '" + ex.intent + "' unknown to the model");
            std::cout << format_report(evaluate(model.logreg, vectorize(model, ds), model.labels));
        } else if (*ingest) {
            auto embedder = make_embedding_provider(config.embed);
            KnowledgeBase kb(embedder, config.hnsw);
            if (ingest_paths.empty()) ingest_paths.push_back(config.knowledge_docs);
            std::size_t chunks = 0;
            for (const auto& p : ingest_paths) chunks += ingest_path(kb, p, chunk_options(config));
            kb.save(config.index_dir);
            std::cout << "indexed " << chunks << " chunks into " << config.index_dir << "\n";
        } else if (*serve) {
            if (!host.empty()) config.host = host;
            if (port >= 0) config.port = port;
            auto engine = build_engine(config);
            ChatService service(engine, {chunk_options(config), config.index_dir});
            g_service = &service;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            service.listen(config.host, config.port);
            g_service = nullptr;
        } else if (*chat) {
            auto engine = build_engine(config);
            std::string line;
            std::cout << "> " << std::flush;
            while (std::getline(std::cin, line)) {
                if (!unicode::trim(line).empty()) print_reply(engine->handle_turn(session_id, line));
                std::cout << "> " << std::flush;
            }
            std::cout << "\n";
        } else if (*bench) {
            if (delay_ms >= 0) config.generate.delay_ms = delay_ms;
            std::vector<std::string> nlu_queries, rag_queries;
            if (bench_n > 0) {
                const auto ds = load_dataset(config.train_dataset, Script::Latin);
                const auto knowledge = split_list(config.knowledge_intents);
                for (const auto& ex : ds.examples)
                    if (std::find(knowledge.begin(), knowledge.end(), ex.intent) == knowledge.end())
                        nlu_queries.push_back(ex.utterance.text);
            }
            if (bench_rag_n > 0)
                for (auto& [q, gold] : load_questions(config.bench_questions)) rag_queries.push_back(q);
            std::string text = "no turns measured\n";
            if (bench_n > 0 || bench_rag_n > 0) {
                auto engine = build_engine(config);
                text = run_bench(*engine, nlu_queries, bench_n, rag_queries, bench_rag_n).render();
            }
            std::cout << text;
            if (!bench_out.empty()) io::write_file_atomic(bench_out, text);
        } else if (*norm) {
            std::ifstream in_file;
            if (!norm_in.empty()) {
                in_file.open(norm_in);
                if (!in_file) throw DataError("cannot open " + norm_in);
            }
            std::ostringstream out;
            auto show = [&out](const std::string& t) {
                const auto n = normalize(t);
                out << to_string(n.script) << "\t" << n.text << "\n";
            };
            if (!norm_in.empty() || norm_texts.empty()) {
                std::istream& src = norm_in.empty() ? std::cin : in_file;
                std::string line;
                while (std::getline(src, line)) {
                    if (!line.empty() && line.back() == '\r') line.pop_back();
                    show(line);
                }
            }
            for (const auto& t : norm_texts) show(t);
            if (norm_out.empty()) std::cout << out.str();
            else io::write_file_atomic(norm_out, out.str());
        } else if (*stats) {
            if (!stats_dataset.empty()) config.train_dataset = stats_dataset;
            const auto s = compute_stats(load_dataset(config.train_dataset, Script::Latin));
            std::cout << "examples " << s.total << "\nintents " << s.intents << "\nmean " << s.mean_per_intent
                      << "\nmedian " << s.median_per_intent << "\nmin " << s.min_per_intent << "\nmax "
                      << s.max_per_intent << "\n";
            for (const auto& [intent, n] : s.per_intent) std::cout << intent << "\t" << n << "\n";
        } else if (*config_cmd) {
            validate_config(config, check_paths);
            std::cout << serialize_config(config);
        }
        return 0;
    } catch (const DataError& e) {
        spdlog::error("{}", e.what());
        return kExitData;
    } catch (const FormatError& e) {
        spdlog::error("{}", e.what());
        return kExitData;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitRuntime;
    }
}
