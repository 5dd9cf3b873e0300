#include "core/png.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "core/error.hpp"

namespace jigclu {

namespace zlib {

uint32_t crc32(const uint8_t* data, size_t len, uint32_t crc) {
    static uint32_t table[256];
    static bool init = false;
    if (!init) {
        for (uint32_t i = 0; i < 256; ++i) {
            uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            table[i] = c;
        }
        init = true;
    }
    crc ^= 0xffffffffu;
    for (size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xff] ^ (crc >> 8);
    return crc ^ 0xffffffffu;
}

uint32_t adler32(const uint8_t* data, size_t len) {
    uint32_t a = 1, b = 0;
    for (size_t i = 0; i < len; ++i) {
        a = (a + data[i]) % 65521u;
        b = (b + a) % 65521u;
    }
    return (b << 16) | a;
}

std::vector<uint8_t> compress_stored(const std::vector<uint8_t>& raw) {
    std::vector<uint8_t> out;
    out.reserve(raw.size() + raw.size() / 65535 * 5 + 16);
    out.push_back(0x78); // CMF: deflate, 32K window
    out.push_back(0x01); // FLG: no dict, fastest
    size_t pos = 0;
    do {
        size_t chunk = std::min(raw.size() - pos, size_t(65535));
        bool final = (pos + chunk == raw.size());
        out.push_back(final ? 0x01 : 0x00); // BFINAL, BTYPE=00 (stored)
        out.push_back(uint8_t(chunk & 0xff));
        out.push_back(uint8_t(chunk >> 8));
        out.push_back(uint8_t(~chunk & 0xff));
        out.push_back(uint8_t((~chunk >> 8) & 0xff));
        out.insert(out.end(), raw.begin() + long(pos), raw.begin() + long(pos + chunk));
        pos += chunk;
    } while (pos < raw.size());
    uint32_t ad = adler32(raw.data(), raw.size());
    for (int i = 3; i >= 0; --i) out.push_back(uint8_t(ad >> (8 * i)));
    return out;
}

namespace {

class BitReader {
public:
    BitReader(const uint8_t* data, size_t len) : data_(data), len_(len) {}

    uint32_t bits(int n) {
        while (count_ < n) {
            require_data(pos_ < len_, "deflate: truncated stream");
            acc_ |= uint64_t(data_[pos_++]) << count_;
            count_ += 8;
        }
        uint32_t v = uint32_t(acc_ & ((1ull << n) - 1));
        acc_ >>= n;
        count_ -= n;
        return v;
    }

    void align_byte() {
        acc_ >>= (count_ & 7);
        count_ -= (count_ & 7);
    }

    const uint8_t* raw(size_t n) {
        require(count_ == 0, "deflate: raw read while bits pending");
        require_data(pos_ + n <= len_, "deflate: truncated stored block");
        const uint8_t* p = data_ + pos_;
        pos_ += n;
        return p;
    }

private:
    const uint8_t* data_;
    size_t len_;
    size_t pos_ = 0;
    uint64_t acc_ = 0;
    int count_ = 0;
};

// Canonical Huffman decoder from code lengths (RFC 1951 section 3.2.2).
struct Huffman {
    std::vector<uint16_t> counts;  // per bit length
    std::vector<uint16_t> symbols; // sorted by code

    void build(const uint8_t* lengths, int n) {
        counts.assign(16, 0);
        for (int i = 0; i < n; ++i) counts[lengths[i]]++;
        counts[0] = 0;
        int total = 0;
        for (int l = 1; l <= 15; ++l) total += counts[size_t(l)];
        symbols.assign(size_t(total), 0);
        std::vector<int> offs(16, 0);
        for (int l = 1; l < 15; ++l) offs[size_t(l) + 1] = offs[size_t(l)] + counts[size_t(l)];
        for (int i = 0; i < n; ++i)
            if (lengths[i]) symbols[size_t(offs[lengths[i]]++)] = uint16_t(i);
    }

    int decode(BitReader& br) const {
        int code = 0, first = 0, index = 0;
        for (int len = 1; len <= 15; ++len) {
            code |= int(br.bits(1));
            int count = counts[size_t(len)];
            if (code - first < count) return symbols[size_t(index + code - first)];
            index += count;
            first = (first + count) << 1;
            code <<= 1;
        }
        throw DataError("deflate: invalid Huffman code");
    }
};

const uint16_t kLenBase[29] = {3,  4,  5,  6,  7,  8,  9,  10, 11,  13,
                               15, 17, 19, 23, 27, 31, 35, 43, 51,  59,
                               67, 83, 99, 115, 131, 163, 195, 227, 258};
const uint8_t kLenExtra[29] = {0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2,
                               2, 3, 3, 3, 3, 4, 4, 4, 4, 5, 5, 5, 5, 0};
const uint16_t kDistBase[30] = {1,    2,    3,    4,    5,    7,     9,    13,
                                17,   25,   33,   49,   65,   97,    129,  193,
                                257,  385,  513,  769,  1025, 1537,  2049, 3073,
                                4097, 6145, 8193, 12289, 16385, 24577};
const uint8_t kDistExtra[30] = {0, 0, 0, 0, 1, 1, 2, 2,  3,  3,  4,  4,  5,  5,  6,
                                6, 7, 7, 8, 8, 9, 9, 10, 10, 11, 11, 12, 12, 13, 13};

void inflate_block(BitReader& br, const Huffman& lit, const Huffman& dist,
                   std::vector<uint8_t>& out) {
    for (;;) {
        int sym = lit.decode(br);
        if (sym < 256) {
            out.push_back(uint8_t(sym));
        } else if (sym == 256) {
            return;
        } else {
            sym -= 257;
            require_data(sym < 29, "deflate: bad length symbol");
            int len = kLenBase[sym] + int(br.bits(kLenExtra[sym]));
            int dsym = dist.decode(br);
            require_data(dsym < 30, "deflate: bad distance symbol");
            size_t d = kDistBase[dsym] + br.bits(kDistExtra[dsym]);
            require_data(d <= out.size(), "deflate: distance past start");
            size_t from = out.size() - d;
            for (int i = 0; i < len; ++i) out.push_back(out[from + size_t(i)]);
        }
    }
}

} // namespace

std::vector<uint8_t> decompress(const uint8_t* data, size_t len) {
    require_data(len >= 6, "zlib: stream too short");
    require_data((data[0] & 0x0f) == 8, "zlib: not deflate");
    require_data(((unsigned(data[0]) << 8) | data[1]) % 31 == 0, "zlib: bad header check");
    require_data((data[1] & 0x20) == 0, "zlib: preset dictionary unsupported");

    BitReader br(data + 2, len - 6);
    std::vector<uint8_t> out;
    bool final = false;
    while (!final) {
        final = br.bits(1) != 0;
        uint32_t type = br.bits(2);
        if (type == 0) {
            br.align_byte();
            uint32_t n = br.bits(16);
            uint32_t nn = br.bits(16);
            require_data((n ^ 0xffff) == nn, "deflate: stored length mismatch");
            const uint8_t* p = br.raw(n);
            out.insert(out.end(), p, p + n);
        } else if (type == 1) {
            static Huffman fixed_lit, fixed_dist;
            static bool init = false;
            if (!init) {
                uint8_t ll[288];
                for (int i = 0; i < 144; ++i) ll[i] = 8;
                for (int i = 144; i < 256; ++i) ll[i] = 9;
                for (int i = 256; i < 280; ++i) ll[i] = 7;
                for (int i = 280; i < 288; ++i) ll[i] = 8;
                fixed_lit.build(ll, 288);
                uint8_t dl[30];
                for (auto& d : dl) d = 5;
                fixed_dist.build(dl, 30);
                init = true;
            }
            inflate_block(br, fixed_lit, fixed_dist, out);
        } else if (type == 2) {
            int hlit = int(br.bits(5)) + 257;
            int hdist = int(br.bits(5)) + 1;
            int hclen = int(br.bits(4)) + 4;
            static const int order[19] = {16, 17, 18, 0, 8,  7, 9,  6, 10, 5,
                                          11, 4,  12, 3, 13, 2, 14, 1, 15};
            uint8_t cl[19] = {0};
            for (int i = 0; i < hclen; ++i) cl[order[i]] = uint8_t(br.bits(3));
            Huffman clh;
            clh.build(cl, 19);
            uint8_t lens[288 + 32] = {0};
            int n = 0;
            while (n < hlit + hdist) {
                int sym = clh.decode(br);
                if (sym < 16) {
                    lens[n++] = uint8_t(sym);
                } else if (sym == 16) {
                    require_data(n > 0, "deflate: repeat with no previous length");
                    int rep = 3 + int(br.bits(2));
                    for (int i = 0; i < rep; ++i, ++n) lens[n] = lens[n - 1];
                } else if (sym == 17) {
                    n += 3 + int(br.bits(3));
                } else {
                    n += 11 + int(br.bits(7));
                }
                require_data(n <= hlit + hdist, "deflate: code length overflow");
            }
            Huffman lit, dist;
            lit.build(lens, hlit);
            dist.build(lens + hlit, hdist);
            inflate_block(br, lit, dist, out);
        } else {
            throw DataError("deflate: reserved block type");
        }
    }
    return out;
}

} // namespace zlib

namespace {

void put_u32(std::vector<uint8_t>& v, uint32_t x) {
    for (int i = 3; i >= 0; --i) v.push_back(uint8_t(x >> (8 * i)));
}

uint32_t get_u32(const uint8_t* p) {
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) |
           uint32_t(p[3]);
}

void write_chunk(std::ofstream& f, const char* type, const std::vector<uint8_t>& payload) {
    std::vector<uint8_t> head;
    put_u32(head, uint32_t(payload.size()));
    f.write(reinterpret_cast<const char*>(head.data()), 4);
    std::vector<uint8_t> body(type, type + 4);
    body.insert(body.end(), payload.begin(), payload.end());
    f.write(reinterpret_cast<const char*>(body.data()), long(body.size()));
    std::vector<uint8_t> tail;
    put_u32(tail, zlib::crc32(body.data(), body.size()));
    f.write(reinterpret_cast<const char*>(tail.data()), 4);
}

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    require_data(f.good(), "cannot open file: " + path);
    f.seekg(0, std::ios::end);
    const size_t len = size_t(f.tellg());
    f.seekg(0);
    std::vector<uint8_t> buf(len);
    f.read(reinterpret_cast<char*>(buf.data()), long(len));
    require_data(f.good(), "short read: " + path);
    return buf;
}

} // namespace

void write_png(const std::string& path, const Image& img) {
    std::ofstream f(path, std::ios::binary);
    require_data(f.good(), "cannot open for write: " + path);
    static const uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    f.write(reinterpret_cast<const char*>(sig), 8);

    std::vector<uint8_t> ihdr;
    put_u32(ihdr, uint32_t(img.width));
    put_u32(ihdr, uint32_t(img.height));
    ihdr.push_back(8); // bit depth
    ihdr.push_back(2); // color type: truecolor
    ihdr.push_back(0); // compression
    ihdr.push_back(0); // filter
    ihdr.push_back(0); // interlace
    write_chunk(f, "IHDR", ihdr);

    auto bytes = to_bytes(img);
    std::vector<uint8_t> raw;
    raw.reserve(size_t(img.height) * (size_t(img.width) * 3 + 1));
    for (int y = 0; y < img.height; ++y) {
        raw.push_back(0); // filter: none
        const uint8_t* row = &bytes[size_t(y) * size_t(img.width) * 3];
        raw.insert(raw.end(), row, row + size_t(img.width) * 3);
    }
    write_chunk(f, "IDAT", zlib::compress_stored(raw));
    write_chunk(f, "IEND", {});
    require_data(f.good(), "write failed: " + path);
}

Image read_png(const std::string& path) {
    auto buf = read_file(path);
    static const uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    require_data(buf.size() > 8 && std::memcmp(buf.data(), sig, 8) == 0,
                 "not a PNG file: " + path);

    int width = 0, height = 0, bit_depth = 0, color_type = 0;
    std::vector<uint8_t> idat;
    size_t pos = 8;
    bool seen_iend = false;
    while (pos + 8 <= buf.size() && !seen_iend) {
        uint32_t len = get_u32(&buf[pos]);
        require_data(pos + 12 + len <= buf.size(), "PNG: truncated chunk in " + path);
        std::string type(reinterpret_cast<const char*>(&buf[pos + 4]), 4);
        const uint8_t* payload = &buf[pos + 8];
        uint32_t crc = get_u32(&buf[pos + 8 + len]);
        require_data(zlib::crc32(&buf[pos + 4], len + 4) == crc,
                     "PNG: chunk CRC mismatch in " + path);
        if (type == "IHDR") {
            width = int(get_u32(payload));
            height = int(get_u32(payload + 4));
            bit_depth = payload[8];
            color_type = payload[9];
            require_data(payload[12] == 0, "PNG: interlaced images unsupported");
            require_data(bit_depth == 8, "PNG: only 8-bit depth supported");
            require_data(color_type == 0 || color_type == 2 || color_type == 4 ||
                             color_type == 6,
                         "PNG: palette images unsupported");
        } else if (type == "IDAT") {
            idat.insert(idat.end(), payload, payload + len);
        } else if (type == "IEND") {
            seen_iend = true;
        }
        pos += 12 + len;
    }
    require_data(width > 0 && height > 0 && !idat.empty(), "PNG: missing image data");

    int channels = (color_type == 0) ? 1 : (color_type == 2) ? 3 : (color_type == 4) ? 2 : 4;
    auto raw = zlib::decompress(idat.data(), idat.size());
    size_t stride = size_t(width) * size_t(channels);
    require_data(raw.size() == (stride + 1) * size_t(height), "PNG: decoded size mismatch");

    // undo per-row filters in place
    std::vector<uint8_t> pix(stride * size_t(height));
    for (int y = 0; y < height; ++y) {
        uint8_t filter = raw[size_t(y) * (stride + 1)];
        const uint8_t* src = &raw[size_t(y) * (stride + 1) + 1];
        uint8_t* dst = &pix[size_t(y) * stride];
        const uint8_t* up = y > 0 ? &pix[size_t(y - 1) * stride] : nullptr;
        for (size_t x = 0; x < stride; ++x) {
            int a = x >= size_t(channels) ? dst[x - size_t(channels)] : 0;
            int b = up ? up[x] : 0;
            int c = (up && x >= size_t(channels)) ? up[x - size_t(channels)] : 0;
            int v = src[x];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: {
                    int p = a + b - c;
                    int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
                    v += (pa <= pb && pa <= pc) ? a : (pb <= pc ? b : c);
                    break;
                }
                default: throw DataError("PNG: unknown filter type");
            }
            dst[x] = uint8_t(v);
        }
    }

    Image img(height, width);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const uint8_t* p = &pix[size_t(y) * stride + size_t(x) * size_t(channels)];
            float r, g, b;
            if (channels <= 2) {
                r = g = b = float(p[0]) / 255.0f;
            } else {
                r = float(p[0]) / 255.0f;
                g = float(p[1]) / 255.0f;
                b = float(p[2]) / 255.0f;
            }
            img.at(y, x, 0) = r;
            img.at(y, x, 1) = g;
            img.at(y, x, 2) = b;
        }
    }
    return img;
}

void write_ppm(const std::string& path, const Image& img) {
    std::ofstream f(path, std::ios::binary);
    require_data(f.good(), "cannot open for write: " + path);
    f << "P6\n" << img.width << " " << img.height << "\n255\n";
    auto bytes = to_bytes(img);
    f.write(reinterpret_cast<const char*>(bytes.data()), long(bytes.size()));
    require_data(f.good(), "write failed: " + path);
}

Image read_ppm(const std::string& path) {
    auto buf = read_file(path);
    require_data(buf.size() > 2 && buf[0] == 'P' && buf[1] == '6', "not a P6 PPM: " + path);
    size_t pos = 2;
    auto next_int = [&]() {
        while (pos < buf.size() && (std::isspace(buf[pos]) || buf[pos] == '#')) {
            if (buf[pos] == '#')
                while (pos < buf.size() && buf[pos] != '\n') ++pos;
            else
                ++pos;
        }
        int v = 0;
        bool any = false;
        while (pos < buf.size() && std::isdigit(buf[pos])) {
            v = v * 10 + (buf[pos++] - '0');
            any = true;
        }
        require_data(any, "PPM: malformed header in " + path);
        return v;
    };
    int w = next_int(), h = next_int(), maxval = next_int();
    require_data(maxval == 255, "PPM: only maxval 255 supported");
    ++pos; // single whitespace after maxval
    require_data(buf.size() - pos >= size_t(w) * size_t(h) * 3, "PPM: truncated: " + path);
    return from_bytes(&buf[pos], h, w);
}

bool is_supported_image(const std::string& path) {
    auto dot = path.rfind('.');
    if (dot == std::string::npos) return false;
    std::string ext = path.substr(dot);
    for (auto& c : ext) c = char(std::tolower(c));
    return ext == ".png" || ext == ".ppm";
}

Image read_image_file(const std::string& path) {
    auto dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    for (auto& c : ext) c = char(std::tolower(c));
    if (ext == ".png") return read_png(path);
    if (ext == ".ppm") return read_ppm(path);
    throw DataError("unsupported image format: " + path);
}

} // namespace jigclu
