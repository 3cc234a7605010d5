#include <gtest/gtest.h>

#include <cmath>

#include <nfsm/nn.hpp>

#include "oracles.hpp"

using namespace nfsm;

TEST( Init, ScaledUniformAndZeroBias )
{
  const auto mlp = init_mlp( { 16, 8, 3 }, { Activation::relu, Activation::identity }, 7 );
  ASSERT_EQ( mlp.layers.size(), 2u );
  EXPECT_EQ( mlp.layers[0].weights.rows(), 8 );
  EXPECT_EQ( mlp.layers[0].weights.cols(), 16 );
  EXPECT_LE( mlp.layers[0].weights.cwiseAbs().maxCoeff(), 0.25 );
  EXPECT_LE( mlp.layers[1].weights.cwiseAbs().maxCoeff(), std::sqrt( 1.0 / 8 ) );
  EXPECT_EQ( mlp.layers[0].bias, Eigen::VectorXd::Zero( 8 ) );
  EXPECT_EQ( mlp.parameter_count(), 16u * 8 + 8 + 8 * 3 + 3 );
  EXPECT_EQ( mlp, init_mlp( { 16, 8, 3 }, { Activation::relu, Activation::identity }, 7 ) );
  EXPECT_FALSE( mlp == init_mlp( { 16, 8, 3 }, { Activation::relu, Activation::identity }, 8 ) );
}

TEST( Init, RejectsBadShapes )
{
  EXPECT_THROW( init_mlp( { 3 }, {}, 0 ), std::domain_error );
  EXPECT_THROW( init_mlp( { 3, 2 }, {}, 0 ), std::domain_error );
  EXPECT_THROW( init_mlp( { 3, 0, 1 }, { Activation::relu, Activation::identity }, 0 ), std::domain_error );
  EXPECT_THROW( init_mlp( { 3, 1 }, { Activation::step }, 0 ), std::domain_error );
}

TEST( Loss, BceAtZeroLogitIsLog2 )
{
  const Eigen::MatrixXd pre = Eigen::MatrixXd::Zero( 1, 4 );
  const Eigen::MatrixXd out = Eigen::MatrixXd::Constant( 1, 4, 0.5 );
  const Eigen::MatrixXd y = ( Eigen::MatrixXd( 1, 4 ) << 0, 1, 1, 0 ).finished();
  const auto v = evaluate_loss( Loss::bce, Activation::sigmoid, pre, out, y );
  EXPECT_NEAR( v.loss, std::log( 2.0 ), 1e-15 );
  EXPECT_NEAR( v.d_pre( 0, 0 ), 0.5 / 4, 1e-15 );
  EXPECT_NEAR( v.d_pre( 0, 1 ), -0.5 / 4, 1e-15 );
  EXPECT_THROW( evaluate_loss( Loss::bce, Activation::identity, pre, out, y ), std::domain_error );
}

TEST( Loss, BceIsFiniteForSaturatedLogits )
{
  const Eigen::MatrixXd pre = ( Eigen::MatrixXd( 1, 2 ) << 800, -800 ).finished();
  const Eigen::MatrixXd out = ( Eigen::MatrixXd( 1, 2 ) << 1, 0 ).finished();
  const Eigen::MatrixXd y = ( Eigen::MatrixXd( 1, 2 ) << 0, 0 ).finished();
  const auto v = evaluate_loss( Loss::bce, Activation::sigmoid, pre, out, y );
  EXPECT_NEAR( v.loss, 400.0, 1e-9 );
}

TEST( Loss, MseMeanOverEntries )
{
  const Eigen::MatrixXd out = ( Eigen::MatrixXd( 2, 1 ) << 1, 3 ).finished();
  const Eigen::MatrixXd y = ( Eigen::MatrixXd( 2, 1 ) << 0, 0 ).finished();
  const auto v = evaluate_loss( Loss::mse, Activation::identity, out, out, y );
  EXPECT_DOUBLE_EQ( v.loss, 5.0 );
  EXPECT_DOUBLE_EQ( v.d_pre( 1, 0 ), 3.0 );
}

TEST( Loss, SoftmaxCrossEntropy )
{
  // Uniform logits over 4 classes: loss log 4, gradient p - y.
  const Eigen::MatrixXd out = Eigen::MatrixXd::Zero( 4, 2 );
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero( 4, 2 );
  y( 1, 0 ) = 1;
  y( 3, 1 ) = 1;
  const auto v = evaluate_loss( Loss::softmax_ce, Activation::identity, out, out, y );
  EXPECT_NEAR( v.loss, std::log( 4.0 ), 1e-15 );
  EXPECT_NEAR( v.d_pre( 1, 0 ), ( 0.25 - 1 ) / 2, 1e-15 );
  EXPECT_NEAR( v.d_pre( 0, 0 ), 0.25 / 2, 1e-15 );
  EXPECT_THROW( evaluate_loss( Loss::softmax_ce, Activation::sigmoid, out, out, y ), std::domain_error );
  EXPECT_THROW( evaluate_loss( Loss::softmax_ce, Activation::identity, out, out, Eigen::MatrixXd::Zero( 3, 2 ) ),
                std::domain_error );
}

TEST( Gradients, MatchFiniteDifferencesOnFixedCases )
{
  for ( std::uint64_t seed = 0; seed < 12; ++seed )
  {
    const auto c = oracle::gradient_case( seed );
    EXPECT_LT( c.relative_error, 1e-4 ) << c.description << " seed " << seed;
  }
}

TEST( Adam, FirstStepMovesByLearningRate )
{
  // With bias correction the first update is lr * g / (|g| + eps), i.e. lr * sign(g).
  std::vector<DenseLayer> layers{ { ( Eigen::MatrixXd( 1, 2 ) << 1.0, -2.0 ).finished(), Eigen::VectorXd::Zero( 1 ),
                                    Activation::identity } };
  Gradients g{ { ( Eigen::MatrixXd( 1, 2 ) << 0.3, -5.0 ).finished(), Eigen::VectorXd::Zero( 1 ) } };
  AdamState adam( layers, {} );
  adam.apply( layers, g );
  EXPECT_NEAR( layers[0].weights( 0, 0 ), 1.0 - 0.01, 1e-9 );
  EXPECT_NEAR( layers[0].weights( 0, 1 ), -2.0 + 0.01, 1e-9 );
  EXPECT_EQ( layers[0].bias[0], 0.0 );
  EXPECT_EQ( adam.step_count(), 1u );
}

TEST( Adam, SecondStepMatchesHandComputation )
{
  std::vector<DenseLayer> layers{ { Eigen::MatrixXd::Zero( 1, 1 ), Eigen::VectorXd::Zero( 1 ), Activation::identity } };
  AdamState adam( layers, { 0.1, 0.9, 0.999, 1e-8 } );
  adam.apply( layers, { { Eigen::MatrixXd::Constant( 1, 1, 1.0 ), Eigen::VectorXd::Zero( 1 ) } } );
  adam.apply( layers, { { Eigen::MatrixXd::Constant( 1, 1, 3.0 ), Eigen::VectorXd::Zero( 1 ) } } );
  const double m = ( 0.9 * 0.1 + 0.1 * 3.0 ) / ( 1 - 0.81 );
  const double v = ( 0.999 * 0.001 + 0.001 * 9.0 ) / ( 1 - 0.999 * 0.999 );
  EXPECT_NEAR( layers[0].weights( 0, 0 ), -0.1 / ( 1.0 + 1e-8 ) - 0.1 * m / ( std::sqrt( v ) + 1e-8 ), 1e-12 );
}

TEST( Train, FitsXor )
{
  Eigen::MatrixXd x( 2, 4 );
  x << 0, 0, 1, 1, 0, 1, 0, 1;
  const Eigen::MatrixXd y = ( Eigen::MatrixXd( 1, 4 ) << 0, 1, 1, 0 ).finished();
  TrainConfig cfg;
  cfg.epochs = 500;
  cfg.learning_rate = 0.05;
  const auto r = train( init_mlp( { 2, 16, 1 }, { Activation::relu, Activation::sigmoid }, 3 ), x, y, cfg );
  ASSERT_EQ( r.loss_trace.size(), 500u );
  EXPECT_LT( r.loss_trace.back(), r.loss_trace.front() );
  for ( Eigen::Index c = 0; c < 4; ++c )
    EXPECT_EQ( binarized_forward( r.model, Eigen::VectorXd( x.col( c ) ) )[0], y( 0, c ) );
}

TEST( Train, IsDeterministic )
{
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity( 3, 3 );
  Eigen::MatrixXd y = Eigen::MatrixXd::Identity( 3, 3 );
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.loss = Loss::softmax_ce;
  const auto a = train( init_mlp( { 3, 4, 3 }, { Activation::relu, Activation::identity }, 1 ), x, y, cfg );
  const auto b = train( init_mlp( { 3, 4, 3 }, { Activation::relu, Activation::identity }, 1 ), x, y, cfg );
  EXPECT_EQ( a.model, b.model );
  EXPECT_EQ( a.loss_trace, b.loss_trace );
}

TEST( Train, ProgressCallbackSeesEveryEpoch )
{
  std::size_t calls = 0;
  TrainConfig cfg;
  cfg.epochs = 7;
  cfg.progress = [&]( std::size_t epoch, double ) { EXPECT_EQ( epoch, calls++ ); };
  train( init_mlp( { 1, 1 }, { Activation::sigmoid }, 0 ), Eigen::MatrixXd::Ones( 1, 2 ), Eigen::MatrixXd::Ones( 1, 2 ),
         cfg );
  EXPECT_EQ( calls, 7u );
}

TEST( Binarize, RoundsAndNeedsSigmoid )
{
  auto mlp = init_mlp( { 1, 2 }, { Activation::sigmoid }, 0 );
  mlp.layers[0].weights.setZero();
  mlp.layers[0].bias << 3.0, -3.0;
  EXPECT_EQ( binarized_forward( mlp, Eigen::VectorXd::Zero( 1 ) ), ( Eigen::VectorXd( 2 ) << 1, 0 ).finished() );
  mlp.layers[0].activation = Activation::identity;
  EXPECT_THROW( binarized_forward( mlp, Eigen::VectorXd::Zero( 1 ) ), std::domain_error );
}
