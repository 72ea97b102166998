from .baselines import GAModel, ga_fit, ga_predict, ga_split, ga_surrogate_precision, gl_predict
from .bayes import MultinomialNB
from .forest import RandomForest, majority
from .linear import LinearRegressionClassifier
from .local import (ALL_METHODS, LEARNERS, LOCAL_METHODS, MethodSpec, Prediction, classify_local,
                    max_median_label)

__all__ = [
    "ALL_METHODS", "LEARNERS", "LOCAL_METHODS", "GAModel",
    "LinearRegressionClassifier", "MethodSpec", "MultinomialNB", "Prediction", "RandomForest",
    "classify_local", "ga_fit", "ga_predict", "ga_split", "ga_surrogate_precision", "gl_predict",
    "majority", "max_median_label",
]
