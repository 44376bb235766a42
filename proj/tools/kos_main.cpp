#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kos/kos.hpp"

namespace {

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw kos::FormatError("cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void printDiagnostic(const kos::Diagnostic& d) {
    std::cout << (d.severity == kos::Severity::Error ? "ERROR" : "WARNING") << " " << d.code;
    for (const std::string& s : d.subjects) std::cout << " " << s;
    std::cout << " " << d.message << "\n";
}

kos::RelationType relationArg(const std::string& token) {
    auto rel = kos::relationFromToken(token);
    if (!rel) throw CLI::ValidationError("--rel", "unknown relation token '" + token + "'");
    return *rel;
}

kos::KindSet kindsArg(const std::string& csv) {
    unsigned bits = 0;
    std::stringstream ss(csv);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        if (piece == "generic") bits |= 1u;
        else if (piece == "partitive") bits |= 2u;
        else throw CLI::ValidationError("--kinds", "unknown hierarchy kind '" + piece + "'");
    }
    if (!bits) throw CLI::ValidationError("--kinds", "at least one kind is required");
    return static_cast<kos::KindSet>(bits);
}

void printConceptSet(const kos::ConceptSet& set) {
    for (const kos::ConceptId& c : set) std::cout << c.str() << "\n";
}

std::string renderPath(const std::vector<kos::Edge>& path) {
    std::string out;
    if (path.empty()) return out;
    out += path.front().source.str();
    for (const kos::Edge& e : path) out += " -> " + e.target.str();
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kos — faceted vocabularies, typed-relation inference, constraint retrieval"};
    app.require_subcommand(1);
    int rc = 0;

    // validate <kos>
    {
        auto* cmd = app.add_subcommand("validate", "check structural rules, print diagnostics");
        auto file = std::make_shared<std::string>();
        cmd->add_option("kos", *file, "knowledge base file")->required()->check(CLI::ExistingFile);
        cmd->callback([file, &rc] {
            auto diags = kos::validate(kos::parseKos(readFile(*file)));
            for (const auto& d : diags) printDiagnostic(d);
            if (kos::hasErrors(diags)) rc = 1;
        });
    }

    // lint <kos>
    {
        auto* cmd = app.add_subcommand("lint", "flag redundant associative attachments");
        auto file = std::make_shared<std::string>();
        cmd->add_option("kos", *file, "knowledge base file")->required()->check(CLI::ExistingFile);
        cmd->callback([file] {
            for (const auto& d : kos::lintRedundant(kos::parseKos(readFile(*file))))
                printDiagnostic(d);
        });
    }

    // closure <kos> --concept <ref> [--dir down|up] [--kinds ...] [--no-self]
    {
        auto* cmd = app.add_subcommand("closure", "hierarchical closure of one concept");
        auto file = std::make_shared<std::string>();
        auto ref = std::make_shared<std::string>();
        auto dir = std::make_shared<std::string>("down");
        auto kinds = std::make_shared<std::string>("generic,partitive");
        auto noSelf = std::make_shared<bool>(false);
        cmd->add_option("kos", *file, "knowledge base file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--concept", *ref, "concept id or \"label\"")->required();
        cmd->add_option("--dir", *dir, "down (descendants) or up (ancestors)")
            ->check(CLI::IsMember({"down", "up"}));
        cmd->add_option("--kinds", *kinds, "comma list of generic,partitive");
        cmd->add_flag("--no-self", *noSelf, "exclude the concept itself");
        cmd->callback([=] {
            kos::KnowledgeBase kb = kos::parseKos(readFile(*file));
            kos::ConceptId c = kos::resolveRef(kb, *ref);
            kos::KindSet ks = kindsArg(*kinds);
            printConceptSet(*dir == "up" ? kos::ancestors(kb, c, ks, !*noSelf)
                                         : kos::descendants(kb, c, ks, !*noSelf));
        });
    }

    // select <kos> --under <ref> --rel <token> --target <ref>
    {
        auto* cmd = app.add_subcommand("select", "constraint selection below a concept");
        auto file = std::make_shared<std::string>();
        auto under = std::make_shared<std::string>();
        auto rel = std::make_shared<std::string>();
        auto target = std::make_shared<std::string>();
        cmd->add_option("kos", *file, "knowledge base file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--under", *under, "root of the selection")->required();
        cmd->add_option("--rel", *rel, "relation token")->required();
        cmd->add_option("--target", *target, "constraining concept")->required();
        cmd->callback([=] {
            kos::KnowledgeBase kb = kos::parseKos(readFile(*file));
            printConceptSet(kos::selectConstrained(kb, kos::resolveRef(kb, *under),
                                                   relationArg(*rel),
                                                   kos::resolveRef(kb, *target)));
        });
    }

    // infer <kos>
    {
        auto* cmd = app.add_subcommand("infer", "materialize all inferences with witness paths");
        auto file = std::make_shared<std::string>();
        cmd->add_option("kos", *file, "knowledge base file")->required()->check(CLI::ExistingFile);
        cmd->callback([file] {
            for (const auto& e : kos::materializeInferences(kos::parseKos(readFile(*file)))) {
                std::cout << e.source.str() << " " << kos::relationToken(e.type) << " "
                          << e.target.str() << "  via: " << renderPath(e.viaPath) << "\n";
            }
        });
    }

    // compose --r1 <token> --r2 <token>
    {
        auto* cmd = app.add_subcommand("compose", "look up one composition judgment");
        auto r1 = std::make_shared<std::string>();
        auto r2 = std::make_shared<std::string>();
        cmd->add_option("--r1", *r1, "first relation token")->required();
        cmd->add_option("--r2", *r2, "second relation token")->required();
        cmd->callback([=] {
            const kos::CompositionEntry& e =
                kos::compose(relationArg(*r1), relationArg(*r2));
            std::cout << kos::statusToken(e.status);
            if (e.result) std::cout << " " << kos::relationToken(*e.result);
            std::cout << "\n";
        });
    }

    // query <kos> <corpus> --q "<query>"
    {
        auto* cmd = app.add_subcommand("query", "evaluate a boolean query over a corpus");
        auto kosFile = std::make_shared<std::string>();
        auto corpusFile = std::make_shared<std::string>();
        auto q = std::make_shared<std::string>();
        cmd->add_option("kos", *kosFile, "knowledge base file")->required()->check(CLI::ExistingFile);
        cmd->add_option("corpus", *corpusFile, "corpus file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--q", *q, "query text")->required();
        cmd->callback([=] {
            kos::KnowledgeBase kb = kos::parseKos(readFile(*kosFile));
            kos::Corpus corpus = kos::parseCorpus(readFile(*corpusFile));
            kos::ResultSet result = kos::evalQuery(kb, corpus, *q);
            for (const kos::DocId& d : result.docs) std::cout << d.str() << "\n";
            std::cout << "matched-terms:";
            for (const kos::ConceptId& c : result.matchedTerms) std::cout << " " << c.str();
            std::cout << "\n";
        });
    }

    // import-skos <ntriples> --out <kos>
    {
        auto* cmd = app.add_subcommand("import-skos", "import an N-Triples SKOS subset");
        auto in = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        cmd->add_option("ntriples", *in, "N-Triples input")->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", *out, "canonical output file")->required();
        cmd->callback([=] {
            kos::SkosImport imported = kos::importSkosSubset(readFile(*in));
            std::ofstream dst(*out, std::ios::binary);
            if (!dst) throw kos::FormatError("cannot write file '" + *out + "'");
            dst << kos::serializeKos(imported.kb);
            std::cout << "skipped-predicates: " << imported.skippedPredicates << "\n";
        });
    }

    // export-dot <kos>
    {
        auto* cmd = app.add_subcommand("export-dot", "emit a Graphviz view of the structure");
        auto file = std::make_shared<std::string>();
        cmd->add_option("kos", *file, "knowledge base file")->required()->check(CLI::ExistingFile);
        cmd->callback([file] { std::cout << kos::exportDot(kos::parseKos(readFile(*file))); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 2;
    } catch (const kos::Error& e) {
        std::cerr << "ERROR " << e.codeToken() << ": " << e.what() << "\n";
        return 1;
    }
    return rc;
}
