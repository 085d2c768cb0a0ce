#include <gtest/gtest.h>

#include <cstdio>
#include <jpeglib.h>

#include "ensemble/error.hpp"
#include "ensemble/image_io.hpp"
#include "ensemble/preprocess.hpp"
#include "test_util.hpp"

namespace ensemble {
namespace {

RasterImage random_image(Rng& rng, int w, int h, int channels) {
  RasterImage img(w, h, channels);
  for (auto& p : img.data()) p = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

RasterImage constant_image(int w, int h, int channels, std::uint8_t value) {
  RasterImage img(w, h, channels);
  std::fill(img.data().begin(), img.data().end(), value);
  return img;
}

void write_jpeg(const std::filesystem::path& path, const RasterImage& img) {
  jpeg_compress_struct cinfo{};
  jpeg_error_mgr jerr{};
  cinfo.err = jpeg_std_error(&jerr);
  jpeg_create_compress(&cinfo);
  std::FILE* f = std::fopen(path.c_str(), "wb");
  ASSERT_NE(f, nullptr);
  jpeg_stdio_dest(&cinfo, f);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = img.channels();
  cinfo.in_color_space = img.channels() == 3 ? JCS_RGB : JCS_GRAYSCALE;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, 100, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(img.data().data() + static_cast<std::size_t>(cinfo.next_scanline) *
                                                                img.width() * img.channels());
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  std::fclose(f);
}

TEST(RasterImage, Validation) {
  EXPECT_THROW(RasterImage(0, 4, 1), DomainError);
  EXPECT_THROW(RasterImage(4, 4, 2), FormatError);
  EXPECT_THROW(RasterImage(2, 2, 1, std::vector<std::uint8_t>(3)), DimensionError);
}

TEST(Resize, SameSizeIsBitIdentical) {
  Rng rng(1);
  const RasterImage img = random_image(rng, 224, 224, 3);
  EXPECT_EQ(resize(img, 224, 224), img);
}

TEST(Resize, CheckerboardToSinglePixel) {
  // Output centre maps to source (0.5, 0.5): each of the four pixels gets
  // weight 1/4, so the blend is 127.5 and rounds half up to 128.
  const RasterImage board(2, 2, 1, {0, 255, 255, 0});
  const RasterImage out = resize(board, 1, 1);
  ASSERT_EQ(out.width(), 1);
  const double blend = 0.25 * 0 + 0.25 * 255 + 0.25 * 255 + 0.25 * 0;
  EXPECT_EQ(blend, 127.5);
  EXPECT_EQ(out.at(0, 0), 128);
}

TEST(Resize, ConstantImageStaysConstant) {
  const RasterImage img = constant_image(448, 448, 3, 173);
  const RasterImage out = resize(img, 224, 224);
  EXPECT_EQ(out, constant_image(224, 224, 3, 173));
}

TEST(Resize, HandComputedUpsample) {
  // 2x1 -> 4x1: source x = (x + 0.5) / 2 - 0.5 = -0.25, 0.25, 0.75, 1.25,
  // clamped to 0, 0.25, 0.75, 1.
  const RasterImage img(2, 1, 1, {0, 100});
  const RasterImage out = resize(img, 4, 1);
  EXPECT_EQ(out.data(), (std::vector<std::uint8_t>{0, 25, 75, 100}));
}

TEST(Resize, Errors) {
  EXPECT_THROW(resize(RasterImage{}, 4, 4), DomainError);
  EXPECT_THROW(resize(constant_image(4, 4, 1, 0), 0, 4), DomainError);
}

TEST(Resize, IdempotentAtTarget) {
  Rng rng(2);
  const RasterImage once = resize(random_image(rng, 50, 37, 1), 32, 32);
  EXPECT_EQ(resize(once, 32, 32), once);
}

TEST(ColorConversion, GrayToRgb) {
  const RasterImage gray(1, 1, 1, {100});
  EXPECT_EQ(to_rgb(gray).data(), (std::vector<std::uint8_t>{100, 100, 100}));
  EXPECT_EQ(to_rgb(RasterImage(1, 1, 1, {0})).data(), (std::vector<std::uint8_t>{0, 0, 0}));
  Rng rng(3);
  const RasterImage rgb = random_image(rng, 5, 4, 3);
  EXPECT_EQ(to_rgb(rgb), rgb);
}

TEST(ColorConversion, LumaWeights) {
  const RasterImage rgb(1, 1, 3, {200, 100, 50});
  // 0.299*200 + 0.587*100 + 0.114*50 = 124.2
  EXPECT_EQ(to_gray(rgb).at(0, 0), 124);
}

TEST(Augment, IdentityConfigIsIdentity) {
  Rng data(4);
  const RasterImage img = random_image(data, 31, 20, 3);
  Rng rng(9);
  EXPECT_EQ(augment(img, AugmentationConfig::identity(), rng), img);
}

TEST(Augment, ReflectionIsVerticalFlipAndInvolution) {
  Rng data(5);
  const RasterImage img = random_image(data, 16, 9, 1);
  AugmentationConfig cfg = AugmentationConfig::identity();
  cfg.reflect_probability = 1.0;
  Rng rng(10);
  const RasterImage once = augment(img, cfg, rng);
  EXPECT_EQ(once, flip_vertical(img));
  EXPECT_EQ(once.at(3, 0), img.at(3, 8));
  EXPECT_EQ(augment(once, cfg, rng), img);
}

TEST(Augment, TranslationShiftsAndFillsBlack) {
  const RasterImage img = constant_image(10, 10, 1, 200);
  const RasterImage out = apply_augmentation(img, {false, 3.0, 0.0, 1.0, 1.0});
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) {
      // Output x samples source x - 3; columns 0..2 map outside (< -0.5).
      EXPECT_EQ(out.at(x, y), x < 3 ? 0 : 200) << x << "," << y;
    }
  }
}

TEST(Augment, ReflectionFrequency) {
  AugmentationConfig cfg;
  Rng rng(2024);
  int reflected = 0;
  for (int i = 0; i < 10000; ++i) reflected += draw_augmentation(cfg, rng).reflect;
  const double freq = reflected / 10000.0;
  EXPECT_GE(freq, 0.48);
  EXPECT_LE(freq, 0.52);
}

TEST(Augment, DrawsStayInRange) {
  AugmentationConfig cfg;
  Rng rng(77);
  for (int i = 0; i < 2000; ++i) {
    const auto d = draw_augmentation(cfg, rng);
    ASSERT_GE(d.dx, -30.0);
    ASSERT_LT(d.dx, 30.0);
    ASSERT_GE(d.dy, -30.0);
    ASSERT_LT(d.dy, 30.0);
    ASSERT_GE(d.sx, 0.9);
    ASSERT_LT(d.sx, 1.1);
    ASSERT_GE(d.sy, 0.9);
    ASSERT_LT(d.sy, 1.1);
  }
}

TEST(Augment, ConfigValidation) {
  AugmentationConfig cfg;
  cfg.reflect_probability = 1.5;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = {};
  cfg.scale_lo = 0.0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = {};
  cfg.translate_lo = 5;
  cfg.translate_hi = -5;
  EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(AugmentProperty, DeterministicAndDimensionPreserving) {
  Rng data(6);
  std::vector<RasterImage> images;
  for (int i = 0; i < 12; ++i) {
    images.push_back(random_image(data, 8 + static_cast<int>(data.below(40)),
                                  8 + static_cast<int>(data.below(40)), i % 2 ? 3 : 1));
  }
  AugmentationConfig cfg;
  cfg.seed = 99;
  const auto a = augment_batch(images, cfg, 3);
  const auto b = augment_batch(images, cfg, 3);
  const auto serial = augment_batch_serial(images, cfg, 3);
  ASSERT_EQ(a, b);
  ASSERT_EQ(a, serial);
  for (std::size_t i = 0; i < images.size(); ++i) {
    EXPECT_EQ(a[i].width(), images[i].width());
    EXPECT_EQ(a[i].height(), images[i].height());
    EXPECT_EQ(a[i].channels(), images[i].channels());
  }
  const auto other_stream = augment_batch(images, cfg, 4);
  EXPECT_NE(a, other_stream);
}

TEST(ImageIo, PngRoundTrip) {
  testing::TempDir dir("png");
  Rng rng(7);
  for (int channels : {1, 3}) {
    const RasterImage img = random_image(rng, 13, 7, channels);
    write_png(dir / "x.png", img);
    EXPECT_EQ(read_image(dir / "x.png"), img);
  }
}

TEST(ImageIo, JpegDecodes) {
  testing::TempDir dir("jpg");
  const RasterImage gray = constant_image(16, 8, 1, 90);
  write_jpeg(dir / "g.jpg", gray);
  const RasterImage back = read_image(dir / "g.jpg");
  ASSERT_EQ(back.channels(), 1);
  ASSERT_EQ(back.width(), 16);
  ASSERT_EQ(back.height(), 8);
  for (auto p : back.data()) EXPECT_NEAR(p, 90, 2);

  const RasterImage rgb = constant_image(8, 8, 3, 140);
  write_jpeg(dir / "c.jpeg", rgb);
  EXPECT_EQ(read_image(dir / "c.jpeg").channels(), 3);
}

TEST(ImageIo, Errors) {
  testing::TempDir dir("bad");
  EXPECT_THROW(read_image(dir / "missing.png"), IoError);
  {
    std::FILE* f = std::fopen((dir / "junk.png").c_str(), "wb");
    std::fputs("not an image at all", f);
    std::fclose(f);
  }
  EXPECT_THROW(read_image(dir / "junk.png"), FormatError);
}

}  // namespace
}  // namespace ensemble
