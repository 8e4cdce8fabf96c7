#include "phaselab/surgery.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace phaselab {

namespace fs = std::filesystem;

namespace {

// Next header token, skipping whitespace and # comments.
std::string header_token(std::istream& is) {
    std::string tok;
    int c;
    while ((c = is.get()) != EOF) {
        if (c == '#') {
            while ((c = is.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

int header_int(std::istream& is, const fs::path& path) {
    const auto tok = header_token(is);
    try {
        return std::stoi(tok);
    } catch (const std::exception&) {
        throw CorpusIoError("read_pgm: malformed header in " + path.string());
    }
}

}  // namespace

ImagePatch read_pgm(const fs::path& path, int label) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CorpusIoError("read_pgm: cannot open " + path.string());
    const auto magic = header_token(is);
    if (magic != "P5" && magic != "P6") throw CorpusIoError("read_pgm: unsupported format in " + path.string());
    const int channels = magic == "P6" ? 3 : 1;
    const int w = header_int(is, path), h = header_int(is, path), maxval = header_int(is, path);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) throw CorpusIoError("read_pgm: bad header in " + path.string());
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h * channels * bytes);
    is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (is.gcount() != static_cast<std::streamsize>(raw.size())) throw CorpusIoError("read_pgm: truncated " + path.string());

    ImagePatch p(h, w, label);
    for (std::size_t i = 0; i < p.size(); ++i) {
        double sum = 0;
        for (int c = 0; c < channels; ++c) {
            const std::size_t j = (i * channels + c) * bytes;
            sum += bytes == 2 ? (raw[j] << 8 | raw[j + 1]) : raw[j];
        }
        p.pixels[i] = sum / channels / maxval;
    }
    return p;
}

void write_pgm(const fs::path& path, const ImagePatch& p) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw CorpusIoError("write_pgm: cannot open " + path.string());
    const auto [lo, hi] = std::minmax_element(p.pixels.begin(), p.pixels.end());
    const double span = *hi > *lo ? *hi - *lo : 1.0;
    os << "P5\n" << p.w << ' ' << p.h << "\n65535\n";
    for (double v : p.pixels) {
        const auto q = static_cast<unsigned>(std::lround((v - *lo) / span * 65535.0));
        os.put(static_cast<char>(q >> 8));
        os.put(static_cast<char>(q & 0xff));
    }
    if (!os) throw CorpusIoError("write_pgm: write failed for " + path.string());
}

Corpus read_corpus(const fs::path& root) {
    std::ifstream man(root / "manifest.txt");
    if (!man) throw CorpusIoError("read_corpus: missing " + (root / "manifest.txt").string());
    Corpus c;
    for (std::string line; std::getline(man, line);) {
        line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char ch) { return std::isspace(ch); }), line.end());
        if (!line.empty()) c.class_names.push_back(line);
    }
    if (c.class_names.size() < 2) throw CorpusIoError("read_corpus: manifest needs at least two classes");
    for (std::size_t k = 0; k < c.class_names.size(); ++k) {
        const auto dir = root / c.class_names[k];
        if (!fs::is_directory(dir)) throw CorpusIoError("read_corpus: missing class directory " + dir.string());
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_regular_file() && e.path().extension() == ".pgm") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) c.patches.push_back(read_pgm(f, static_cast<int>(k)));
    }
    return c;
}

void write_corpus(const fs::path& root, const Corpus& corpus) {
    fs::create_directories(root);
    std::ofstream man(root / "manifest.txt");
    if (!man) throw CorpusIoError("write_corpus: cannot write manifest under " + root.string());
    for (const auto& name : corpus.class_names) {
        man << name << "\n";
        fs::create_directories(root / name);
    }
    std::vector<std::size_t> counter(corpus.class_names.size(), 0);
    for (const auto& p : corpus.patches) {
        const auto k = static_cast<std::size_t>(p.class_label);
        if (k >= corpus.class_names.size()) throw CorpusIoError("write_corpus: label without a class name");
        char name[32];
        std::snprintf(name, sizeof name, "%05zu.pgm", counter[k]++);
        write_pgm(root / corpus.class_names[k] / name, p);
    }
}

}  // namespace phaselab
