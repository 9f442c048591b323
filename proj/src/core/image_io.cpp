#include "core/image_io.hpp"

#include "core/error.hpp"

#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>

namespace darktext {

namespace {

unsigned char to_byte(double v) {
    return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

} // namespace

ImageTensor read_image(const std::filesystem::path& path, ImageReadMode mode) {
    require(std::filesystem::exists(path), ErrorCode::Io, "cannot read image: " + path.string() + " does not exist");
    int flag = cv::IMREAD_COLOR;
    if (mode == ImageReadMode::Gray) flag = cv::IMREAD_GRAYSCALE;
    cv::Mat mat = cv::imread(path.string(), flag);
    require(!mat.empty(), ErrorCode::Io, "cannot decode image " + path.string());
    require(mat.depth() == CV_8U, ErrorCode::Data, "image " + path.string() + " is not 8-bit");
    const int channels = mat.channels() == 1 ? 1 : 3;
    ImageTensor out(mat.rows, mat.cols, channels);
    for (int y = 0; y < mat.rows; ++y) {
        const unsigned char* row = mat.ptr<unsigned char>(y);
        for (int x = 0; x < mat.cols; ++x) {
            if (channels == 1) {
                out.at(y, x) = row[x] / 255.0;
            } else {
                // OpenCV stores BGR
                out.at(y, x, 0) = row[3 * x + 2] / 255.0;
                out.at(y, x, 1) = row[3 * x + 1] / 255.0;
                out.at(y, x, 2) = row[3 * x + 0] / 255.0;
            }
        }
    }
    return out;
}

void write_image(const std::filesystem::path& path, const ImageTensor& img) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    cv::Mat mat(img.height(), img.width(), img.channels() == 1 ? CV_8UC1 : CV_8UC3);
    for (int y = 0; y < img.height(); ++y) {
        unsigned char* row = mat.ptr<unsigned char>(y);
        for (int x = 0; x < img.width(); ++x) {
            if (img.channels() == 1) {
                row[x] = to_byte(img.at(y, x));
            } else {
                row[3 * x + 2] = to_byte(img.at(y, x, 0));
                row[3 * x + 1] = to_byte(img.at(y, x, 1));
                row[3 * x + 0] = to_byte(img.at(y, x, 2));
            }
        }
    }
    require(cv::imwrite(path.string(), mat), ErrorCode::Io, "cannot write image " + path.string());
}

ImageTensor quantize_8bit(const ImageTensor& img) {
    ImageTensor out = img;
    for (double& v : out.values()) v = to_byte(v) / 255.0;
    return out;
}

bool is_image_file(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

} // namespace darktext
