# Copyright 2026 The ottopics Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Topic modeling with embedding clustering regularization."""

from ._core import (
    BowCorpus,
    Error,
    IoError,
    ModelConfig,
    ModelState,
    NumericError,
    TrainConfig,
    ValidationError,
    build_corpus,
    cluster_documents,
    compute_beta,
    corpus_from_dense,
    dkm_entropy_loss,
    dkm_loss,
    ecr_loss,
    extract_topics,
    generate_zipf_corpus,
    gradcheck,
    init_model,
    make_prior,
    min_topic_distance,
    nmi,
    npmi,
    perplexity,
    purity,
    sinkhorn,
    topic_diversity,
    train,
    transport_cost,
)

__version__ = "0.1.0"
