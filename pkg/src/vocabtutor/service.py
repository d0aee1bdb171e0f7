"""HTTP surface over a live engine: selection, grading, groups, and status.

One endpoint per engine operation, same semantics, no extra logic. Domain
errors map 1:1 onto HTTP codes: unknown ids are 404, conflicting group
membership is 409, bad values are 400, storage faults are 500. The response
body always carries the domain error class name so clients can branch on it.
"""

from __future__ import annotations

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .engine import TutorEngine
from .errors import (
    ConflictingAssignment,
    StorageError,
    TutorError,
    UnknownClass,
    UnknownItem,
    UnknownLearner,
    UnknownWord,
)
from .learner_model import Dimension
from .reports import word_status_for_class, word_status_for_learner

__all__ = ["create_app"]

_NOT_FOUND = (UnknownLearner, UnknownWord, UnknownItem, UnknownClass)


def _status_for(err: TutorError) -> int:
    if isinstance(err, _NOT_FOUND):
        return 404
    if isinstance(err, ConflictingAssignment):
        return 409
    if isinstance(err, StorageError):
        return 500
    return 400


class RegisterLearnerBody(BaseModel):
    learnerId: str
    classId: str | None = None


class WordPerformanceBody(BaseModel):
    wordId: str
    dimension: str = Dimension.LISTENING.value
    score: float


class GroupAssignmentBody(BaseModel):
    groupId: str
    learnerIds: list[str]
    learnableWordIds: list[str]
    assessableWordIds: list[str]


def _dimension(raw: str) -> Dimension:
    try:
        return Dimension(raw)
    except ValueError:
        raise TutorError(f"unknown dimension {raw!r}") from None


def _word_doc(engine: TutorEngine, word_id: str) -> dict:
    node = engine.web.word(word_id)
    return {"wordId": node.word_id, "lemma": node.lemma,
            "imageIds": list(node.image_ids), "videoIds": list(node.video_ids)}


def create_app(engine: TutorEngine) -> FastAPI:
    app = FastAPI(title="vocabtutor", version="0.1.0")

    @app.exception_handler(TutorError)
    async def _tutor_error(request: Request, err: TutorError):
        return JSONResponse(
            status_code=_status_for(err),
            content={"error": type(err).__name__, "detail": str(err)},
        )

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, err: ValueError):
        return JSONResponse(status_code=400,
                            content={"error": "ValueError", "detail": str(err)})

    @app.post("/learners", status_code=201)
    def register_learner(body: RegisterLearnerBody):
        engine.register_learner(body.learnerId, body.classId)
        return {"learnerId": body.learnerId, "classId": body.classId}

    @app.get("/learners/{learner_id}/next-learning-words")
    def next_learning_words(learner_id: str,
                            dimension: str = Query(Dimension.LISTENING.value),
                            n: int = Query(5, ge=1)):
        words = engine.get_next_learning_words(learner_id, _dimension(dimension), n)
        return {"learnerId": learner_id, "dimension": dimension,
                "words": [_word_doc(engine, w) for w in words]}

    @app.get("/learners/{learner_id}/next-assessment-words")
    def next_assessment_words(learner_id: str,
                              dimension: str = Query(Dimension.LISTENING.value),
                              n: int = Query(5, ge=1)):
        words = engine.get_next_assessment_words(learner_id, _dimension(dimension), n)
        return {"learnerId": learner_id, "dimension": dimension,
                "words": [_word_doc(engine, w) for w in words]}

    @app.post("/learners/{learner_id}/word-performance")
    def word_performance(learner_id: str, body: WordPerformanceBody):
        state = engine.update_word_performance(
            learner_id, body.wordId, _dimension(body.dimension), body.score)
        return {
            "learnerId": learner_id,
            "wordId": body.wordId,
            "dimension": body.dimension,
            "score": state.score,
            "phase": state.phase.value,
            "assessmentCount": state.assessment_count,
        }

    @app.post("/group-assignment", status_code=201)
    def assign_group(body: GroupAssignmentBody):
        assignment = engine.assign_words_to_learner_group(
            body.groupId, body.learnerIds,
            body.learnableWordIds, body.assessableWordIds)
        return {
            "groupId": assignment.group_id,
            "learnerIds": sorted(assignment.learner_ids),
            "learnableWordIds": sorted(assignment.learnable_word_ids),
            "assessableWordIds": sorted(assignment.assessable_word_ids),
        }

    @app.get("/learners/{learner_id}/word-status")
    def learner_word_status(learner_id: str,
                            dimension: str = Query(Dimension.LISTENING.value)):
        rows = word_status_for_learner(engine, learner_id, _dimension(dimension))
        return {"learnerId": learner_id, "dimension": dimension, "words": [
            {"wordId": r.word_id, "lemma": r.lemma, "phase": r.phase.value,
             "score": r.score, "assessmentCount": r.assessment_count,
             "learningExposures": r.learning_exposures}
            for r in rows
        ]}

    @app.get("/classes/{class_id}/word-status")
    def class_word_status(class_id: str,
                          dimension: str = Query(Dimension.LISTENING.value)):
        rows = word_status_for_class(engine, class_id, _dimension(dimension))
        return {"classId": class_id, "dimension": dimension, "words": [
            {"wordId": r.word_id, "lemma": r.lemma, "meanScore": r.mean_score,
             "phaseHistogram": r.phase_histogram, "responseCount": r.response_count,
             "meanCorrectRate": r.mean_correct_rate, "priorityRank": r.priority_rank}
            for r in rows
        ]}

    return app
