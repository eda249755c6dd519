#include "ecosim/snapshot.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include <fmt/format.h>

namespace ecosim {

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error(fmt::format("line {}: {}", line, what)), line_(line) {}

namespace {

constexpr std::string_view kHeader = "alphabet ";

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

void write_agent(std::ostream& out, const Agent& agent) {
    const auto& attrs = agent.attributes();
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        out << (i ? "," : "") << attrs[i];
    }
}

Agent parse_agent(std::string_view text, std::size_t line, std::size_t field) {
    std::vector<int> attrs;
    for (auto tok : split(text, ',')) {
        int v = 0;
        const auto* end = tok.data() + tok.size();
        auto [ptr, ec] = std::from_chars(tok.data(), end, v);
        if (tok.empty() || ec != std::errc{} || ptr != end) {
            throw ParseError(line, fmt::format("agent {}: bad attribute '{}'", field + 1, tok));
        }
        attrs.push_back(v);
    }
    try {
        return Agent(std::move(attrs));
    } catch (const ValidationError& e) {
        throw ParseError(line, fmt::format("agent {}: {}", field + 1, e.what()));
    }
}

}  // namespace

void write_snapshot(std::ostream& out, const Population& pop) {
    out << kHeader;
    const auto& members = pop.alphabet.members();
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (i) {
            out << '|';
        }
        write_agent(out, members[i]);
    }
    out << '\n';
    for (const auto& g : pop.sequences) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (i) {
                out << '|';
            }
            write_agent(out, pop.alphabet[g[i]]);
        }
        out << '\n';
    }
}

Population read_snapshot(std::istream& in) {
    Population pop;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) {
        throw ParseError(1, "missing alphabet header");
    }
    ++lineno;
    std::string_view header(line);
    if (!header.starts_with(kHeader)) {
        throw ParseError(lineno, "expected 'alphabet' header");
    }
    header.remove_prefix(kHeader.size());
    const auto agents = split(header, '|');
    for (std::size_t f = 0; f < agents.size(); ++f) {
        const Agent a = parse_agent(agents[f], lineno, f);
        if (pop.alphabet.contains(a)) {
            throw ParseError(lineno, fmt::format("agent {}: duplicate alphabet member", f + 1));
        }
        pop.alphabet.add(a);
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        Genome g;
        const auto fields = split(line, '|');
        for (std::size_t f = 0; f < fields.size(); ++f) {
            const Agent a = parse_agent(fields[f], lineno, f);
            const auto idx = pop.alphabet.find(a);
            if (!idx) {
                throw ParseError(lineno, fmt::format("agent {}: not in alphabet", f + 1));
            }
            g.push_back(*idx);
        }
        pop.sequences.push_back(std::move(g));
    }
    return pop;
}

void snapshot_write(const Population& pop, const std::filesystem::path& path) {
    pop.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(fmt::format("cannot open '{}' for writing", path.string()));
    }
    write_snapshot(out, pop);
}

Population snapshot_read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(fmt::format("cannot open '{}'", path.string()));
    }
    return read_snapshot(in);
}

}  // namespace ecosim
