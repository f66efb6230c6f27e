// graph6 reader/writer per the public format definition, plus adjacency JSON.
#include <json.hpp>

#include "snarkforge/multipole.hpp"

namespace snarkforge {

namespace {

constexpr std::string_view kHeader = ">>graph6<<";

} // namespace

std::string emit_graph6(const Multipole& g) {
    if (!g.is_graph()) throw MalformedInput("graph6 encodes graphs, not multipoles");
    int n = g.num_vertices();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (const auto& e : g.edges()) {
        int u = e.a.v, v = e.b.v;
        if (u == v) throw MalformedInput("graph6 cannot encode loops");
        if (adj[u][v]) throw MalformedInput("graph6 cannot encode parallel edges");
        adj[u][v] = adj[v][u] = true;
    }
    std::string out;
    if (n <= 62) {
        out += static_cast<char>(n + 63);
    } else if (n <= 258047) {
        out += '~';
        for (int shift = 12; shift >= 0; shift -= 6)
            out += static_cast<char>(((n >> shift) & 63) + 63);
    } else {
        throw TooLarge("graph6 writer supports n <= 258047");
    }
    int buf = 0, bits = 0;
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < j; ++i) {
            buf = (buf << 1) | (adj[i][j] ? 1 : 0);
            if (++bits == 6) {
                out += static_cast<char>(buf + 63);
                buf = 0;
                bits = 0;
            }
        }
    if (bits > 0) out += static_cast<char>((buf << (6 - bits)) + 63);
    return out;
}

Multipole parse_graph6(std::string_view text) {
    if (text.substr(0, kHeader.size()) == kHeader) text.remove_prefix(kHeader.size());
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' '))
        text.remove_suffix(1);
    if (text.empty()) throw MalformedInput("empty graph6 input");
    if (text[0] == ':' || text[0] == ';' || text[0] == '&')
        throw MalformedInput("only the plain graph6 variant is supported");
    for (char c : text)
        if (c < 63 || c > 126) throw MalformedInput("graph6 byte out of range");

    size_t pos = 0;
    long n;
    if (text[0] != '~') {
        n = text[0] - 63;
        pos = 1;
    } else {
        if (text.size() >= 2 && text[1] == '~')
            throw TooLarge("graph6 reader supports n <= 258047");
        if (text.size() < 4) throw MalformedInput("truncated graph6 size field");
        n = 0;
        for (size_t i = 1; i < 4; ++i) n = (n << 6) | (text[i] - 63);
        pos = 4;
    }
    long nbits = n * (n - 1) / 2;
    long nbytes = (nbits + 5) / 6;
    if (static_cast<long>(text.size()) - static_cast<long>(pos) != nbytes)
        throw MalformedInput("graph6 body has the wrong length");

    Multipole g;
    g.add_vertices(static_cast<int>(n));
    long bit = 0;
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < j; ++i, ++bit) {
            int byte = text[pos + bit / 6] - 63;
            if ((byte >> (5 - bit % 6)) & 1) g.add_edge(i, j);
        }
    return g;
}

std::string adjacency_json(const Multipole& g) {
    if (!g.is_graph()) throw MalformedInput("adjacency JSON encodes graphs, not multipoles");
    nlohmann::json j;
    j["n"] = g.num_vertices();
    j["edges"] = nlohmann::json::array();
    for (const auto& e : g.edges())
        j["edges"].push_back({e.a.v, e.b.v});
    return j.dump();
}

} // namespace snarkforge
