#include "ilsc/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "ilsc/errors.hpp"
#include "ilsc/texture.hpp"

namespace ilsc {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& token) {
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc() || res.ptr != end)
        throw ValidationError("not a number: '" + token + "'");
    if (!std::isfinite(value))
        throw ValidationError("not a finite number: '" + token + "'");
    return value;
}

namespace {

std::int64_t parse_int(const std::string& token) {
    std::int64_t value = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw ValidationError("not an integer: '" + token + "'");
    return value;
}

std::uint64_t parse_uint64(const std::string& token) {
    std::uint64_t value = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw ValidationError("not an unsigned integer: '" + token + "'");
    return value;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string chomp(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

std::ifstream open_input(const std::filesystem::path& path, bool binary = false) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in)
        throw IoError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out)
        throw IoError("cannot write " + path.string());
    return out;
}

} // namespace

Dataset read_feature_csv(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    const std::string where = path.string();

    std::string line;
    if (!std::getline(in, line))
        throw ValidationError(where + ": empty file");
    line = chomp(line);
    if (line != kFeatureCsvHeader)
        throw ValidationError(where + ": header mismatch: expected '" +
                              std::string(kFeatureCsvHeader) + "', got '" + line + "'");

    Dataset dataset;
    dataset.attribute_names = TextureFeatures::attribute_names();
    std::set<std::int64_t> seen_samples;

    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        line = chomp(line);
        if (line.empty()) continue;
        ++row_no;
        const std::vector<std::string> fields = split(line, ',');
        if (fields.size() != 11)
            throw ValidationError(where + ": row " + std::to_string(row_no) +
                                  ": expected 11 columns, got " +
                                  std::to_string(fields.size()));
        DataRow row;
        try {
            row.sample_no = parse_int(fields[0]);
        } catch (const ValidationError&) {
            throw ValidationError(where + ": row " + std::to_string(row_no) +
                                  ", column sample_no: not an integer: '" +
                                  fields[0] + "'");
        }
        if (row.sample_no <= 0)
            throw ValidationError(where + ": row " + std::to_string(row_no) +
                                  ": sample_no must be positive");
        if (!seen_samples.insert(row.sample_no).second)
            throw ValidationError(where + ": row " + std::to_string(row_no) +
                                  ": duplicate sample_no " +
                                  std::to_string(row.sample_no));
        row.values.reserve(9);
        for (int a = 0; a < 9; ++a) {
            try {
                row.values.push_back(parse_double(fields[a + 1]));
            } catch (const ValidationError&) {
                throw ValidationError(where + ": row " + std::to_string(row_no) +
                                      ", column " + dataset.attribute_names[a] +
                                      ": not a number: '" + fields[a + 1] + "'");
            }
        }
        row.label = fields[10];
        if (row.label.empty())
            throw ValidationError(where + ": row " + std::to_string(row_no) +
                                  ": empty class label");
        dataset.note_label(row.label);
        dataset.rows.push_back(std::move(row));
    }

    if (dataset.rows.size() < 2)
        throw ValidationError(where + ": fewer than 2 rows");
    return dataset;
}

void write_feature_csv(const Dataset& dataset, const std::filesystem::path& path) {
    if (dataset.attribute_names.empty())
        throw ValidationError("dataset has an empty attribute list");
    if (dataset.attribute_names != TextureFeatures::attribute_names())
        throw ValidationError("dataset does not match the feature CSV schema");

    std::ofstream out = open_output(path);
    out << kFeatureCsvHeader << '\n';
    for (const DataRow& row : dataset.rows) {
        out << row.sample_no;
        for (double v : row.values) out << ',' << format_double(v);
        out << ',' << row.label << '\n';
    }
    if (!out)
        throw IoError("write failed: " + path.string());
}

namespace {

// Reads one PGM header token, honoring '#' comment lines. Comments carrying
// the resolution tag are parsed into the image metadata.
std::string next_pgm_token(std::istream& in, SpeckleImage& image,
                           const std::string& where) {
    std::string token;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            std::string comment;
            std::getline(in, comment);
            const std::string tag = " resolution_um_per_px=";
            if (comment.rfind(tag, 0) == 0) {
                image.resolution_um_per_px = parse_double(chomp(comment.substr(tag.size())));
                image.resolution_defaulted = false;
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!token.empty()) return token;
            continue;
        }
        token.push_back(static_cast<char>(ch));
    }
    if (token.empty())
        throw ValidationError(where + ": unexpected EOF in header");
    return token;
}

} // namespace

SpeckleImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in = open_input(path, true);
    const std::string where = path.string();

    SpeckleImage image;
    const std::string magic = next_pgm_token(in, image, where);
    if (magic != "P5")
        throw ValidationError(where + ": unsupported format: expected binary PGM (P5), got '" +
                              magic + "'");
    image.width = static_cast<int>(parse_int(next_pgm_token(in, image, where)));
    image.height = static_cast<int>(parse_int(next_pgm_token(in, image, where)));
    const std::int64_t maxval = parse_int(next_pgm_token(in, image, where));
    if (image.width < 1 || image.height < 1)
        throw ValidationError(where + ": invalid dimensions");
    if (maxval != 255)
        throw ValidationError(where + ": unsupported maxval " + std::to_string(maxval) +
                              " (must be 255)");

    // exactly one whitespace byte separates the header from the payload; the
    // token reader has already consumed it
    image.pixels.resize(static_cast<std::size_t>(image.width) * image.height);
    in.read(reinterpret_cast<char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
    if (static_cast<std::size_t>(in.gcount()) != image.pixels.size())
        throw ValidationError(where + ": unexpected EOF in pixel data");
    return image;
}

void write_pgm(const SpeckleImage& image, const std::filesystem::path& path) {
    if (image.width < 1 || image.height < 1 ||
        image.pixels.size() != static_cast<std::size_t>(image.width) * image.height)
        throw ValidationError("invalid image");

    std::ofstream out = open_output(path, true);
    out << "P5\n# resolution_um_per_px=" << format_double(image.resolution_um_per_px)
        << '\n' << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
    if (!out)
        throw IoError("write failed: " + path.string());
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    const std::string where = path.string();

    std::vector<ManifestEntry> entries;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = chomp(line);
        if (line.empty()) continue;
        const std::vector<std::string> fields = split(line, '\t');
        if (fields.size() != 2 && fields.size() != 3)
            throw ValidationError(where + ": line " + std::to_string(line_no) +
                                  ": expected <filename>\\t<label>[\\t<seed>]");
        ManifestEntry entry;
        entry.filename = fields[0];
        entry.label = fields[1];
        if (entry.filename.empty() || entry.label.empty())
            throw ValidationError(where + ": line " + std::to_string(line_no) +
                                  ": empty filename or label");
        if (!seen.insert(entry.filename).second)
            throw ValidationError(where + ": line " + std::to_string(line_no) +
                                  ": duplicate filename '" + entry.filename + "'");
        if (fields.size() == 3)
            entry.seed = parse_uint64(fields[2]);
        entries.push_back(std::move(entry));
    }
    if (entries.empty())
        throw ValidationError(where + ": empty manifest");
    return entries;
}

void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    for (const ManifestEntry& e : entries) {
        out << e.filename << '\t' << e.label;
        if (e.seed) out << '\t' << *e.seed;
        out << '\n';
    }
    if (!out)
        throw IoError("write failed: " + path.string());
}

std::vector<LabeledImage> ingest_corpus(const std::filesystem::path& manifest_path) {
    const std::vector<ManifestEntry> entries = read_manifest(manifest_path);
    const std::filesystem::path base = manifest_path.parent_path();

    std::vector<LabeledImage> corpus;
    corpus.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        std::filesystem::path file(entries[i].filename);
        if (file.is_relative()) file = base / file;
        if (!std::filesystem::exists(file))
            throw IoError(manifest_path.string() + ": line " + std::to_string(i + 1) +
                          ": missing file '" + entries[i].filename + "'");
        LabeledImage li;
        li.image = read_pgm(file);
        li.label = entries[i].label;
        li.seed = entries[i].seed.value_or(0);
        corpus.push_back(std::move(li));
    }
    return corpus;
}

namespace {

constexpr const char* kModelMagic = "ilsc-model 1";

class LineReader {
public:
    LineReader(std::istream& in, std::string where)
        : in_(in), where_(std::move(where)) {}

    std::string next() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            line = chomp(line);
            if (!line.empty()) return line;
        }
        throw ValidationError(where_ + ": unexpected end of model document");
    }

    std::string expect(const std::string& key) {
        const std::string line = next();
        if (line.rfind(key + " ", 0) != 0)
            throw ValidationError(where_ + ": line " + std::to_string(line_no_) +
                                  ": expected '" + key + "', got '" + line + "'");
        return line.substr(key.size() + 1);
    }

    std::size_t line_no() const { return line_no_; }
    const std::string& where() const { return where_; }

private:
    std::istream& in_;
    std::string where_;
    std::size_t line_no_ = 0;
};

std::vector<double> parse_double_list(const std::string& text, std::size_t expected,
                                      const std::string& where) {
    std::vector<double> out;
    if (!text.empty())
        for (const std::string& tok : split(text, ' '))
            out.push_back(parse_double(tok));
    if (out.size() != expected)
        throw ValidationError(where + ": expected " + std::to_string(expected) +
                              " numbers, got " + std::to_string(out.size()));
    return out;
}

} // namespace

void save_model(const BayesNet& net, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << kModelMagic << '\n';
    out << "n_bins " << net.n_bins << '\n';
    out << "threshold " << format_double(net.threshold) << '\n';
    out << "alpha " << format_double(net.alpha) << '\n';

    out << "attributes " << net.n_attributes() << '\n';
    for (const std::string& name : net.attribute_names) out << "attr " << name << '\n';
    out << "classes " << net.n_classes() << '\n';
    for (const std::string& value : net.class_values) out << "class " << value << '\n';

    out << "prior";
    for (double p : net.class_prior) out << ' ' << format_double(p);
    out << '\n';

    out << "class_mi";
    for (double v : net.class_mi) out << ' ' << format_double(v);
    out << '\n';

    for (int a = 0; a < net.n_attributes(); ++a) {
        const AttributeCuts& cuts = net.discretization.attributes[a];
        out << "disc " << a << ' ' << (cuts.degraded ? "degraded" : "ok") << ' '
            << cuts.cuts.size();
        for (double c : cuts.cuts) out << ' ' << format_double(c);
        out << '\n';
    }

    for (int a = 0; a < net.n_attributes(); ++a) {
        const NodeModel& node = net.nodes[a];
        out << "node " << a << ' ' << (node.class_parent ? 1 : 0) << ' '
            << node.attr_parent << ' ' << node.n_states << ' '
            << node.uniform_rows << '\n';
        for (int row = 0; row < node.n_rows(); ++row) {
            out << "cpt";
            for (int v = 0; v < node.n_states; ++v)
                out << ' '
                    << format_double(
                           node.cpt[static_cast<std::size_t>(row) * node.n_states + v]);
            out << '\n';
        }
    }
    out << "end\n";
    if (!out)
        throw IoError("write failed: " + path.string());
}

BayesNet load_model(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    LineReader reader(in, path.string());

    if (reader.next() != kModelMagic)
        throw ValidationError(path.string() + ": not an ilsc model document");

    BayesNet net;
    net.n_bins = static_cast<int>(parse_int(reader.expect("n_bins")));
    net.threshold = parse_double(reader.expect("threshold"));
    net.alpha = parse_double(reader.expect("alpha"));

    const int n_attrs = static_cast<int>(parse_int(reader.expect("attributes")));
    for (int a = 0; a < n_attrs; ++a)
        net.attribute_names.push_back(reader.expect("attr"));
    const int n_classes = static_cast<int>(parse_int(reader.expect("classes")));
    for (int c = 0; c < n_classes; ++c)
        net.class_values.push_back(reader.expect("class"));

    net.class_prior = parse_double_list(reader.expect("prior"), n_classes, reader.where());
    net.class_mi = parse_double_list(reader.expect("class_mi"), n_attrs, reader.where());

    net.discretization.attribute_names = net.attribute_names;
    net.discretization.n_bins = net.n_bins;
    for (int a = 0; a < n_attrs; ++a) {
        const std::vector<std::string> fields = split(reader.expect("disc"), ' ');
        if (fields.size() < 3 || parse_int(fields[0]) != a)
            throw ValidationError(reader.where() + ": malformed disc line for attribute " +
                                  std::to_string(a));
        AttributeCuts cuts;
        cuts.degraded = fields[1] == "degraded";
        const std::size_t n_cuts = static_cast<std::size_t>(parse_int(fields[2]));
        if (fields.size() != 3 + n_cuts)
            throw ValidationError(reader.where() + ": cut count mismatch for attribute " +
                                  std::to_string(a));
        for (std::size_t i = 0; i < n_cuts; ++i)
            cuts.cuts.push_back(parse_double(fields[3 + i]));
        net.discretization.attributes.push_back(std::move(cuts));
    }

    for (int a = 0; a < n_attrs; ++a) {
        const std::vector<std::string> fields = split(reader.expect("node"), ' ');
        if (fields.size() != 5 || parse_int(fields[0]) != a)
            throw ValidationError(reader.where() + ": malformed node line for attribute " +
                                  std::to_string(a));
        NodeModel node;
        node.class_parent = parse_int(fields[1]) != 0;
        node.attr_parent = static_cast<int>(parse_int(fields[2]));
        node.n_states = static_cast<int>(parse_int(fields[3]));
        node.uniform_rows = static_cast<int>(parse_int(fields[4]));
        if (node.n_states != net.discretization.attributes[a].n_states())
            throw ValidationError(reader.where() + ": state count mismatch for attribute " +
                                  std::to_string(a));
        if (node.attr_parent >= n_attrs || node.attr_parent < -1)
            throw ValidationError(reader.where() + ": bad parent index for attribute " +
                                  std::to_string(a));

        int rows = 1;
        if (node.class_parent) {
            rows = n_classes;
            if (node.attr_parent >= 0)
                rows *= net.discretization.attributes[node.attr_parent].n_states();
        }
        for (int row = 0; row < rows; ++row) {
            const std::vector<double> probs = parse_double_list(
                reader.expect("cpt"), static_cast<std::size_t>(node.n_states),
                reader.where());
            node.cpt.insert(node.cpt.end(), probs.begin(), probs.end());
        }
        net.nodes.push_back(std::move(node));
    }

    if (reader.next() != "end")
        throw ValidationError(path.string() + ": missing end marker");
    return net;
}

} // namespace ilsc
